//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsl::linalg::{Fp, Matrix, Subspace};
use qsl::p1::{is_n_regular_p1, P1SheafModel};
use qsl::poly::BinaryForm;
use qsl::quiver::{LabeledQuiver, Path, RelationKind};
use qsl::rational::{frac, int, Rational};
use qsl::rep::{FiniteFieldRep, Representation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn quiver(vertices: &[&str], arrows: &[(&str, &str, &str)]) -> LabeledQuiver {
    LabeledQuiver::new(
        vertices.iter().map(|s| s.to_string()).collect(),
        arrows.iter().map(|(a, s, t)| (a.to_string(), s.to_string(), t.to_string(), 1)).collect(),
    )
    .unwrap()
}

pub fn a2() -> LabeledQuiver {
    quiver(&["1", "2"], &[("a", "1", "2")])
}

pub fn a3() -> LabeledQuiver {
    quiver(&["1", "2", "3"], &[("a", "1", "2"), ("b", "2", "3")])
}

pub fn kronecker() -> LabeledQuiver {
    quiver(&["1", "2"], &[("a", "1", "2"), ("b", "1", "2")])
}

pub fn jordan_square_zero() -> LabeledQuiver {
    let mut q = quiver(&["1"], &[("f", "1", "1")]);
    let p = Path::new(&q, vec![0, 0]).unwrap();
    q.push_relation(RelationKind::Plain, vec![(int(1), p)]).unwrap();
    q
}

/// Kahn's algorithm on the raw arrow list.
pub fn kahn_acyclic(q: &LabeledQuiver) -> bool {
    let n = q.num_vertices();
    let mut indeg = vec![0usize; n];
    for a in q.arrows() {
        indeg[a.dst] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = ready.pop() {
        seen += 1;
        for a in q.arrows().iter().filter(|a| a.src == v) {
            indeg[a.dst] -= 1;
            if indeg[a.dst] == 0 {
                ready.push(a.dst);
            }
        }
    }
    seen == n
}

pub fn theta_slope(dims: &[usize], theta: &[i64]) -> Rational {
    let num: i64 = dims.iter().zip(theta).map(|(&d, &t)| d as i64 * t).sum();
    let den: usize = dims.iter().sum();
    frac(num, den as i64)
}

pub fn diff(big: &[usize], small: &[usize]) -> Vec<usize> {
    big.iter().zip(small).map(|(b, s)| b - s).collect()
}

pub type Lattice = Vec<Vec<Subspace<Fp>>>;

/// Every tuple of subspaces closed under all arrow maps, by brute force over
/// the product of the subspace sets at each vertex.
pub fn brute_lattice(rep: &FiniteFieldRep) -> Lattice {
    let f = *rep.field();
    let per_vertex: Vec<Vec<Subspace<Fp>>> = rep.dims().iter().map(|&d| Subspace::enumerate_all(&f, d)).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; per_vertex.len()];
    loop {
        let tuple: Vec<Subspace<Fp>> = idx.iter().zip(&per_vertex).map(|(&k, s)| s[k].clone()).collect();
        let closed = rep.quiver().arrows().iter().enumerate().all(|(ai, a)| {
            rep.map(ai)
                .iter()
                .all(|m| tuple[a.src].basis().iter().all(|b| tuple[a.dst].contains(&m.apply(b))))
        });
        if closed {
            out.push(tuple);
        }
        let mut v = 0;
        loop {
            if v == idx.len() {
                return out;
            }
            idx[v] += 1;
            if idx[v] < per_vertex[v].len() {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
    }
}

pub fn dims_of(t: &[Subspace<Fp>]) -> Vec<usize> {
    t.iter().map(|s| s.dim()).collect()
}

pub fn within(a: &[Subspace<Fp>], b: &[Subspace<Fp>]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.is_subspace_of(y))
}

pub fn random_matrix(f: &Fp, rows: usize, cols: usize, r: &mut ChaCha8Rng) -> Matrix<Fp> {
    let entries = (0..rows).map(|_| (0..cols).map(|_| r.gen_range(0..f.p())).collect()).collect();
    Matrix::from_rows(f, rows, cols, entries).unwrap()
}

pub fn random_rep(r: &mut ChaCha8Rng) -> (FiniteFieldRep, Vec<i64>) {
    let quivers = [a2(), a3(), kronecker(), quiver(&["1", "2", "3"], &[("a", "1", "3"), ("b", "2", "3")]), quiver(&["1"], &[("f", "1", "1")])];
    let q = Arc::new(quivers[r.gen_range(0..quivers.len())].clone());
    let f = Fp::new(if r.gen_bool(0.6) { 2 } else { 3 }).unwrap();
    let budget = if f.p() == 2 { 5 } else { 4 };
    let n = q.num_vertices();
    let dims = loop {
        let d: Vec<usize> = (0..n).map(|_| r.gen_range(0..=2)).collect();
        let t: usize = d.iter().sum();
        if t > 0 && t <= budget {
            break d;
        }
    };
    let maps = q.arrows().iter().map(|a| vec![random_matrix(&f, dims[a.dst], dims[a.src], r)]).collect();
    let theta = (0..n).map(|_| r.gen_range(-3..=3)).collect();
    (Representation::new(f, q, dims, maps).unwrap(), theta)
}

pub fn rationals(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| int(x)).collect()
}

pub fn rand_pos(r: &mut ChaCha8Rng) -> Rational {
    frac(r.gen_range(1..=9), r.gen_range(1..=4))
}

/// A random split model with arbitrary forms on a relation-free quiver.
pub fn random_model(r: &mut ChaCha8Rng, uniform: bool) -> P1SheafModel {
    let quivers = [quiver(&["1"], &[]), a2(), a3(), kronecker(), quiver(&["1", "2"], &[])];
    let q = Arc::new(quivers[r.gen_range(0..quivers.len())].clone());
    let nb = r.gen_range(1..=2);
    let degrees: Vec<i64> = (0..nb).map(|_| r.gen_range(1..=2)).collect();
    let common = r.gen_range(-1..=2);
    let twists: Vec<Vec<i64>> = loop {
        let t: Vec<Vec<i64>> = (0..q.num_vertices())
            .map(|_| (0..r.gen_range(0..=2)).map(|_| if uniform { common } else { r.gen_range(-1..=2) }).collect())
            .collect();
        if t.iter().any(|v| !v.is_empty()) {
            break t;
        }
    };
    let arrows = q
        .arrows()
        .iter()
        .map(|a| {
            twists[a.dst]
                .iter()
                .map(|&at| {
                    twists[a.src]
                        .iter()
                        .map(|&as_| {
                            let deg = at - as_;
                            if deg < 0 || r.gen_bool(0.3) {
                                BinaryForm::zero(deg)
                            } else {
                                BinaryForm::new(deg, (0..=deg).map(|_| int(r.gen_range(-1..=1))).collect()).unwrap()
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    P1SheafModel::new(q, degrees, twists, arrows).unwrap()
}

/// Smallest regular `n` and a compatible `m > n`.
pub fn regular_nm(model: &P1SheafModel, r: &mut ChaCha8Rng) -> (i64, i64) {
    let n = (1..).find(|&n| is_n_regular_p1(model, n)).unwrap();
    let b = model.bundle_degrees();
    let (bmin, bmax) = (*b.iter().min().unwrap(), *b.iter().max().unwrap());
    let m = (n * bmax + bmin - 1) / bmin + r.gen_range(0..=1);
    (n, m.max(n + 1))
}

pub fn h0(e: i64) -> usize {
    (e + 1).max(0) as usize
}
