mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use qsl::linalg::Fp;
use qsl::quiver::{build_twisted, compose_paths, expand_labeled, LabeledPath, LabeledQuiver, Path, Relation, RelationKind};
use qsl::rational::{frac, int};
use qsl::rep::Representation;

fn random_quiver(seed: u64, labeled: bool) -> LabeledQuiver {
    let mut r = rng(seed);
    let nv = r.gen_range(1..=6);
    let names: Vec<String> = (0..nv).map(|v| format!("x{v}")).collect();
    let arrows = (0..r.gen_range(0..=10))
        .map(|k| (format!("a{k}"), names[r.gen_range(0..nv)].clone(), names[r.gen_range(0..nv)].clone(), if labeled { r.gen_range(1..=3) } else { 1 }))
        .collect();
    LabeledQuiver::new(names, arrows).unwrap()
}

/// Two vertices joined by three parallel arrows.
fn triple() -> LabeledQuiver {
    quiver(&["1", "2"], &[("a", "1", "2"), ("b", "1", "2"), ("c", "1", "2")])
}

fn loops() -> LabeledQuiver {
    LabeledQuiver::new(vec!["o".into()], vec![("f".into(), "o".into(), "o".into(), 2), ("g".into(), "o".into(), "o".into(), 3)]).unwrap()
}

fn labeled_path(q: &LabeledQuiver, steps: &[(usize, usize)]) -> LabeledPath {
    if steps.is_empty() {
        return LabeledPath::trivial(0);
    }
    let path = Path::new(q, steps.iter().map(|&(a, _)| a).collect()).unwrap();
    let label = steps.iter().map(|&(a, h)| h % q.arrows()[a].label_dim).collect();
    LabeledPath { path, label }
}

proptest! {
    #[test]
    fn acyclicity_matches_kahn(seed in any::<u64>(), rows in 1usize..=3) {
        let q = random_quiver(seed, false);
        prop_assert_eq!(q.is_acyclic(), kahn_acyclic(&q));
        let tq = build_twisted(&q, rows, &vec![vec![1; rows]; rows]).unwrap();
        prop_assert_eq!(tq.quiver.is_acyclic(), q.is_acyclic());
        prop_assert_eq!(tq.quiver.num_vertices(), 2 * rows * q.num_vertices());
        prop_assert_eq!(tq.i1.len(), rows * rows * q.num_arrows());
    }

    #[test]
    fn relation_normalization_is_canonical(
        coeffs in prop::collection::vec((-6i64..=6, 1i64..=4), 1..=3),
        scale in (1i64..=5, 1i64..=5, any::<bool>()),
    ) {
        prop_assume!(coeffs.iter().any(|(n, _)| *n != 0));
        let q = triple();
        let terms: Vec<_> = coeffs.iter().enumerate().map(|(k, &(n, d))| (frac(n, d), Path::new(&q, vec![k]).unwrap())).collect();
        let base = Relation::new(&q, RelationKind::Plain, terms.clone(), 0).unwrap();
        let lambda = frac(if scale.2 { scale.0 } else { -scale.0 }, scale.1);
        let scaled: Vec<_> = terms.iter().rev().map(|(c, p)| (c * &lambda, p.clone())).collect();
        prop_assert_eq!(&Relation::new(&q, RelationKind::Plain, scaled, 0).unwrap(), &base);
        // coefficients are coprime integers with a positive lead
        prop_assert!(base.terms()[0].0 > int(0));
        prop_assert!(base.terms().iter().all(|(c, _)| c.is_integer()));
        let g = base.terms().iter().fold(num::BigInt::from(0), |acc, (c, _)| num::Integer::gcd(&acc, c.numer()));
        prop_assert_eq!(g, num::BigInt::from(1));
    }

    #[test]
    fn composition_is_associative(
        p in prop::collection::vec((0usize..2, 0usize..6), 0..3),
        q in prop::collection::vec((0usize..2, 0usize..6), 0..3),
        s in prop::collection::vec((0usize..2, 0usize..6), 0..3),
    ) {
        let lq = loops();
        let (p, q, s) = (labeled_path(&lq, &p), labeled_path(&lq, &q), labeled_path(&lq, &s));
        let left = compose_paths(&lq, &compose_paths(&lq, &p, &q).unwrap().unwrap(), &s).unwrap();
        let right = compose_paths(&lq, &p, &compose_paths(&lq, &q, &s).unwrap().unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        let e = LabeledPath::trivial(0);
        prop_assert_eq!(compose_paths(&lq, &e, &p).unwrap().unwrap(), p.clone());
        prop_assert_eq!(compose_paths(&lq, &p, &e).unwrap().unwrap(), p);
    }

    #[test]
    fn expansion_round_trips(seed in any::<u64>()) {
        let q = Arc::new(random_quiver(seed, true));
        let exp = expand_labeled(&q);
        prop_assert_eq!(exp.quiver.num_vertices(), q.num_vertices());
        prop_assert_eq!(exp.quiver.num_arrows(), q.arrows().iter().map(|a| a.label_dim).sum::<usize>());
        let mut r = rng(seed ^ 0x5eed);
        let f = Fp::new(3).unwrap();
        let dims: Vec<usize> = (0..q.num_vertices()).map(|_| r.gen_range(0..=2)).collect();
        let maps = q.arrows().iter().map(|a| (0..a.label_dim).map(|_| random_matrix(&f, dims[a.dst], dims[a.src], &mut r)).collect()).collect();
        let rep = Representation::new(f, q.clone(), dims.clone(), maps).unwrap();
        let flat = rep.to_expanded(&exp).unwrap();
        prop_assert_eq!(flat.dims(), rep.dims());
        prop_assert_eq!(Representation::from_expanded(&flat, q.clone(), &exp).unwrap(), rep);
        // the representation varieties have the same dimension
        prop_assert_eq!(exp.quiver.rep_variety_dims(&dims).unwrap(), q.rep_variety_dims(&dims).unwrap());
    }
}
