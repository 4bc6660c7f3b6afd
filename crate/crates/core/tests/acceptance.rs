//! Acceptance suite: one PASS/FAIL line per criterion, each with its time
//! budget. Every check compares the library against an oracle written in test
//! code.

mod common;

use std::error::Error as StdError;
use std::panic;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use common::*;
use qsl::embedding::{dim_vector, embed_p1, theta_from_sigma, TwistedRep};
use qsl::linalg::{Fp, Matrix, Subspace, QQ};
use qsl::p1::{scalar_form, symmetric_semistable, P1SheafModel};
use qsl::quiver::{build_twisted, LabeledQuiver, RelationKind, VertexTag};
use qsl::rational::{frac, int, Rational};
use qsl::rep::{FiniteFieldRep, Representation, SubRep};
use qsl::replab::{hn_filtration, is_semistable, StabilityKind, DEFAULT_CAP};
use qsl::sheaf::{self, check_subobjects, NumericalQuiverSheaf, SheafVerdictKind, StabilityPair};
use qsl::walls::{self, Cone, Sign, Space, WallPolynomial};

type Outcome = Result<String, Box<dyn StdError>>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*).into());
        }
    };
}

/// Semistability of `big / small` from the lattice: every `H` strictly
/// between has `μ(H / small) ≤ μ(big / small)`.
fn subquotient_semistable(lat: &Lattice, small: &[Subspace<Fp>], big: &[Subspace<Fp>], theta: &[i64]) -> bool {
    let (ds, db) = (dims_of(small), dims_of(big));
    let mu = theta_slope(&diff(&db, &ds), theta);
    lat.iter()
        .filter(|h| within(small, h) && within(h, big) && dims_of(h) != ds)
        .all(|h| theta_slope(&diff(&dims_of(h), &ds), theta) <= mu)
}

/// All chains `0 ⊊ G¹ ⊊ … ⊊ M` with semistable factors of strictly
/// decreasing slope.
fn hn_chains(lat: &Lattice, theta: &[i64]) -> Vec<Vec<usize>> {
    fn go(lat: &Lattice, theta: &[i64], top: usize, chain: &mut Vec<usize>, last: Option<Rational>, prev: &[Subspace<Fp>], out: &mut Vec<Vec<usize>>) {
        let dp = dims_of(prev);
        if dp == dims_of(&lat[top]) {
            out.push(chain.clone());
            return;
        }
        for (k, h) in lat.iter().enumerate() {
            if dims_of(h) == dp || !within(prev, h) {
                continue;
            }
            let mu = theta_slope(&diff(&dims_of(h), &dp), theta);
            if last.as_ref().is_some_and(|l| mu >= *l) || !subquotient_semistable(lat, prev, h, theta) {
                continue;
            }
            chain.push(k);
            go(lat, theta, top, chain, Some(mu), h, out);
            chain.pop();
        }
    }
    let top = lat.iter().position(|t| t.iter().all(|s| s.is_full())).unwrap();
    let zero = lat.iter().position(|t| t.iter().all(|s| s.is_zero())).unwrap();
    let mut out = Vec::new();
    go(lat, theta, top, &mut Vec::new(), None, &lat[zero].clone(), &mut out);
    out
}

fn all_matrices(f: &Fp, rows: usize, cols: usize) -> Vec<Matrix<Fp>> {
    let p = f.p() as u64;
    let n = rows * cols;
    (0..p.pow(n as u32))
        .map(|mut code| {
            let mut entries = vec![vec![0u8; cols]; rows];
            for x in entries.iter_mut().flatten() {
                *x = (code % p) as u8;
                code /= p;
            }
            Matrix::from_rows(f, rows, cols, entries).unwrap()
        })
        .collect()
}

/// Every representation over `F_2` of the given quiver with all dimensions at
/// most 2, filtered by the relations evaluated directly as matrix products.
fn all_reps(q: &Arc<LabeledQuiver>, f: &Fp) -> Vec<FiniteFieldRep> {
    let n = q.num_vertices();
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let dims: Vec<usize> = (0..n).map(|v| code / 3usize.pow(v as u32) % 3).collect();
        if dims.iter().all(|&d| d == 0) {
            continue;
        }
        let choices: Vec<Vec<Matrix<Fp>>> = q.arrows().iter().map(|a| all_matrices(f, dims[a.dst], dims[a.src])).collect();
        let mut idx = vec![0usize; choices.len()];
        loop {
            let maps: Vec<Vec<Matrix<Fp>>> = idx.iter().zip(&choices).map(|(&k, c)| vec![c[k].clone()]).collect();
            let square_zero = q.relations().is_empty() || maps[0][0].mul(&maps[0][0]).is_zero();
            if square_zero {
                out.push(Representation::new(*f, q.clone(), dims.clone(), maps).unwrap());
            }
            let mut v = 0;
            loop {
                if v == idx.len() {
                    break;
                }
                idx[v] += 1;
                if idx[v] < choices[v].len() {
                    break;
                }
                idx[v] = 0;
                v += 1;
            }
            if v == idx.len() {
                break;
            }
        }
    }
    out
}

// ------------------------------------------------------------- criteria

fn c1_twisted_counts() -> Outcome {
    let q = a2();
    let tq = build_twisted(&q, 2, &[vec![1, 1], vec![1, 1]])?;
    let (q0, q1, n) = (q.num_vertices(), q.num_arrows(), 2);
    ensure!(tq.quiver.num_vertices() == 2 * n * q0, "vertex count {}", tq.quiver.num_vertices());
    ensure!(tq.quiver.num_arrows() == n * n * q0 + 2 * n * q1, "arrow count {}", tq.quiver.num_arrows());
    ensure!(tq.i1.len() == n * n * q1, "I′₁ count {}", tq.i1.len());
    for r in &tq.i1 {
        ensure!(r.kind() == RelationKind::LabeledSquare, "I′₁ relation is not a labeled square");
        let (s, t) = (tq.vertex_tags[r.source()], tq.vertex_tags[r.target()]);
        ensure!(
            matches!(s, VertexTag::V { vertex: 0, .. }) && matches!(t, VertexTag::W { vertex: 1, .. }),
            "I′₁ relation runs {s:?} → {t:?}"
        );
    }
    Ok(format!("{} vertices, {} arrows, {} I′₁ relations", tq.quiver.num_vertices(), tq.quiver.num_arrows(), tq.i1.len()))
}

fn c2_acyclicity() -> Outcome {
    let mut r = rng(2);
    let (mut cyclic, mut builds) = (0, 0);
    for _ in 0..120 {
        let nv = r.gen_range(1..=6);
        let na = r.gen_range(0..=10);
        let names: Vec<String> = (0..nv).map(|v| format!("x{v}")).collect();
        let arrows = (0..na)
            .map(|k| (format!("a{k}"), names[r.gen_range(0..nv)].clone(), names[r.gen_range(0..nv)].clone(), 1))
            .collect();
        let q = LabeledQuiver::new(names, arrows)?;
        let expected = kahn_acyclic(&q);
        cyclic += usize::from(!expected);
        ensure!(q.is_acyclic() == expected, "is_acyclic disagrees with Kahn on the source");
        for rows in 1..=3 {
            let dims: Vec<Vec<usize>> = (0..rows).map(|_| (0..rows).map(|_| r.gen_range(1..=2)).collect()).collect();
            let tq = build_twisted(&q, rows, &dims)?;
            builds += 1;
            ensure!(kahn_acyclic(&tq.quiver) == expected, "twisted quiver acyclicity differs from the source ({rows} rows)");
            ensure!(tq.quiver.is_acyclic() == expected, "is_acyclic wrong on a twisted quiver");
        }
    }
    Ok(format!("120 quivers ({cyclic} cyclic), {builds} twisted builds"))
}

fn c3_semistability_exhaustive() -> Outcome {
    let f = Fp::new(2)?;
    let mut count = 0;
    for q in [a2(), a3(), jordan_square_zero()] {
        let q = Arc::new(q);
        let n = q.num_vertices();
        let thetas: Vec<Vec<i64>> = (0..3usize.pow(n as u32)).map(|c| (0..n).map(|v| (c / 3usize.pow(v as u32) % 3) as i64 - 1).collect()).collect();
        for rep in all_reps(&q, &f) {
            let lat = brute_lattice(&rep);
            for theta in &thetas {
                let mu = theta_slope(rep.dims(), theta);
                let proper: Vec<Rational> = lat
                    .iter()
                    .map(|t| dims_of(t))
                    .filter(|d| d.iter().any(|&x| x > 0) && d.as_slice() != rep.dims())
                    .map(|d| theta_slope(&d, theta))
                    .collect();
                let semistable = proper.iter().all(|s| *s <= mu);
                let stable = proper.iter().all(|s| *s < mu);
                let hn = hn_filtration(&rep, &rationals(theta), DEFAULT_CAP)?;
                ensure!((hn.len() == 1) == semistable, "HN length {} vs lattice verdict {semistable} for dims {:?}, θ {theta:?}", hn.len(), rep.dims());
                let v = is_semistable(&rep, &rationals(theta), DEFAULT_CAP)?;
                let expected = if stable {
                    StabilityKind::Stable
                } else if semistable {
                    StabilityKind::StrictlySemistable
                } else {
                    StabilityKind::Unstable
                };
                ensure!(v.kind == expected, "verdict {:?}, expected {expected:?}", v.kind);
                count += 1;
            }
        }
    }
    Ok(format!("{count} (representation, θ) cases over F₂"))
}

fn c4_hn_properties() -> Outcome {
    let mut r = rng(4);
    let mut lengths = [0usize; 8];
    for _ in 0..200 {
        let (rep, theta) = random_rep(&mut r);
        let hn = hn_filtration(&rep, &rationals(&theta), DEFAULT_CAP)?;
        let mu = theta_slope(rep.dims(), &theta);
        let mut prev = vec![0; rep.dims().len()];
        let mut last: Option<Rational> = None;
        for (k, step) in hn.steps.iter().enumerate() {
            let d = step.dims();
            let s = theta_slope(&diff(&d, &prev), &theta);
            ensure!(last.as_ref().is_none_or(|l| s < *l), "factor slopes do not decrease");
            if k + 1 < hn.len() {
                ensure!(theta_slope(&d, &theta) > mu, "step {k} has slope not above μ(M)");
            }
            last = Some(s);
            prev = d;
        }
        let lat = brute_lattice(&rep);
        let chains = hn_chains(&lat, &theta);
        ensure!(chains.len() == 1, "{} HN chains exist for dims {:?}, θ {theta:?}", chains.len(), rep.dims());
        let ours: Vec<&[Subspace<Fp>]> = hn.steps.iter().map(|s| s.spaces()).collect();
        let theirs: Vec<&[Subspace<Fp>]> = chains[0].iter().map(|&k| lat[k].as_slice()).collect();
        ensure!(ours == theirs, "HN filtration differs from the unique exhaustive chain");
        lengths[hn.len().min(7)] += 1;
    }
    Ok(format!("200 representations, HN lengths {:?}", &lengths[1..]))
}

fn c5_embedding() -> Outcome {
    // the worked A₂ instance: b = 1, E₁ = O(0), E₂ = O(1), arrow x, n = 2, m = 5
    let x = scalar_form(1, &[1, 0]).unwrap();
    let worked = P1SheafModel::new(Arc::new(a2()), vec![1], vec![vec![0], vec![1]], vec![vec![vec![x]]])?;
    let e = embed_p1(&worked, 2, 5)?;
    let th = theta_from_sigma(&[vec![int(1)], vec![int(1)]], &e.dim_vector())?;
    let flat = th.flatten(&e.twisted);
    ensure!(e.rep.dims() == [3, 4, 6, 7], "worked dims {:?}", e.rep.dims());
    ensure!(flat == vec![frac(1, 7), frac(1, 7), frac(-1, 13), frac(-1, 13)], "worked θ {flat:?}");

    let mut r = rng(5);
    for _ in 0..25 {
        let model = random_model(&mut r, false);
        let (n, m) = regular_nm(&model, &mut r);
        let e = embed_p1(&model, n, m)?;
        check_embedding(&model, &e, n, m, &mut r)?;
    }
    Ok("worked A₂ instance and 25 random models".into())
}

fn check_embedding(model: &P1SheafModel, e: &TwistedRep, n: i64, m: i64, r: &mut ChaCha8Rng) -> Result<(), Box<dyn StdError>> {
    let tq = &e.twisted;
    let b = model.bundle_degrees();
    for (x, tag) in tq.vertex_tags.iter().enumerate() {
        let (vertex, row, power) = match *tag {
            VertexTag::V { vertex, row } => (vertex, row, n),
            VertexTag::W { vertex, row } => (vertex, row, m),
        };
        let expected: usize = model.twists()[vertex].iter().map(|&a| h0(a + power * b[row])).sum();
        ensure!(e.rep.dims()[x] == expected, "dimension at {x} is {}, formula gives {expected}", e.rep.dims()[x]);
    }
    ensure!(dim_vector(model, n, m)? == e.dim_vector(), "dim_vector differs from the embedded dimensions");

    let sigma: Vec<Vec<Rational>> = (0..model.twists().len()).map(|_| (0..b.len()).map(|_| rand_pos(r)).collect()).collect();
    let th = theta_from_sigma(&sigma, &e.dim_vector())?.flatten(tq);
    let total: Rational = th.iter().zip(e.rep.dims()).map(|(t, &d)| t * int(d as i64)).sum();
    ensure!(total.is_zero(), "θ·d = {total}");

    let rows = tq.rows;
    for (ai, a) in tq.source.arrows().iter().enumerate() {
        for k in 0..rows {
            for l in 0..rows {
                let right = &e.rep.map(tq.right_index(ai, l))[0];
                let left = &e.rep.map(tq.left_index(ai, k))[0];
                let (pi, pj) = (e.rep.map(tq.phi_index(a.src, k, l)), e.rep.map(tq.phi_index(a.dst, k, l)));
                ensure!(pi.len() == pj.len(), "label dimensions differ across an arrow");
                for (fi, fj) in pi.iter().zip(pj) {
                    ensure!(right.mul(fi) == fj.mul(left), "I′₁ fails for arrow {} at rows {k},{l}", a.id);
                }
            }
        }
    }
    ensure!(e.rep.check_relations(e.twisted.quiver.relations())?.is_none(), "relation check reports a violation");
    Ok(())
}

fn is_closed(e: &TwistedRep, s: &SubRep<QQ>) -> bool {
    e.twisted.quiver.arrows().iter().enumerate().all(|(ai, a)| {
        e.rep.map(ai).iter().all(|m| s.spaces()[a.src].basis().iter().all(|v| s.spaces()[a.dst].contains(&m.apply(v))))
    })
}

/// `(Σ σ dim V, Σ σ dim W)`.
fn aux_parts(e: &TwistedRep, s: &SubRep<QQ>, sigma: &[Vec<Rational>]) -> (Rational, Rational) {
    let (mut num, mut den) = (Rational::zero(), Rational::zero());
    for (x, tag) in e.twisted.vertex_tags.iter().enumerate() {
        let d = int(s.spaces()[x].dim() as i64);
        match *tag {
            VertexTag::V { vertex, row } => num += &sigma[vertex][row] * d,
            VertexTag::W { vertex, row } => den += &sigma[vertex][row] * d,
        }
    }
    (num, den)
}

fn c6_tighten() -> Outcome {
    let mut r = rng(6);
    let (mut count, mut moved) = (0, 0);
    while count < 120 {
        let model = random_model(&mut r, false);
        let (n, m) = regular_nm(&model, &mut r);
        let e = embed_p1(&model, n, m)?;
        let sigma: Vec<Vec<Rational>> = (0..model.twists().len()).map(|_| (0..model.bundle_degrees().len()).map(|_| rand_pos(&mut r)).collect()).collect();
        let dims = e.rep.dims().to_vec();
        for _ in 0..6 {
            let mut seeds: Vec<Subspace<QQ>> = dims.iter().map(|&d| Subspace::zero(&QQ, d)).collect();
            for _ in 0..r.gen_range(1..=2) {
                let x = r.gen_range(0..dims.len());
                if dims[x] == 0 {
                    continue;
                }
                let v: Vec<Rational> = (0..dims[x]).map(|_| int(r.gen_range(-2..=2))).collect();
                seeds[x] = seeds[x].sum(&Subspace::span(&QQ, dims[x], &[v]));
            }
            let s = e.rep.generated_subrep(seeds);
            let t = e.tighten(&s)?;
            ensure!(is_closed(&e, &t), "tightened output is not a subrepresentation");
            for (x, tag) in e.twisted.vertex_tags.iter().enumerate() {
                let (a, b) = (&s.spaces()[x], &t.spaces()[x]);
                let ok = match tag {
                    VertexTag::V { .. } => a.is_subspace_of(b),
                    VertexTag::W { .. } => b.is_subspace_of(a),
                };
                ensure!(ok, "input is not subordinate to its tightening at vertex {x}");
            }
            let ((ns, ds), (nt, dt)) = (aux_parts(&e, &s, &sigma), aux_parts(&e, &t, &sigma));
            ensure!(&ns * &dt <= &nt * &ds, "μ′ decreased: {ns}/{ds} → {nt}/{dt}");
            let tt = e.tighten(&t)?;
            ensure!(tt == t, "a tight subrepresentation moved under tightening");
            moved += usize::from(s != t);
            count += 1;
        }
    }
    Ok(format!("{count} subrepresentations, {moved} changed by tightening"))
}

/// Random torsion-free data: `α_d^{L_l}(E_i) = rk(E_i) · a_l`.
fn random_torsion_free(r: &mut ChaCha8Rng, nb: usize, d: usize, lead: &[i64], ranks: &[i64]) -> NumericalQuiverSheaf {
    let alpha = ranks
        .iter()
        .map(|&rk| {
            (0..nb)
                .map(|l| {
                    (0..=d)
                        .map(|k| {
                            if rk == 0 {
                                int(0)
                            } else if k == d {
                                int(rk * lead[l])
                            } else {
                                int(r.gen_range(-5..=5))
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    NumericalQuiverSheaf::new(d, alpha, Some(rationals(ranks))).unwrap()
}

fn c7_symmetric_linearization() -> Outcome {
    let mut r = rng(7);
    let mut points = 0;
    for _ in 0..100 {
        let (nv, nb, d) = (r.gen_range(1..=3), r.gen_range(1..=3), r.gen_range(1..=3));
        let lead: Vec<i64> = (0..nb).map(|_| r.gen_range(1..=3)).collect();
        let re: Vec<i64> = loop {
            let v: Vec<i64> = (0..nv).map(|_| r.gen_range(0..=2)).collect();
            if v.iter().any(|&x| x > 0) {
                break v;
            }
        };
        let rf: Vec<i64> = loop {
            let v: Vec<i64> = re.iter().map(|&x| r.gen_range(0..=x)).collect();
            if v.iter().any(|&x| x > 0) {
                break v;
            }
        };
        let es = random_torsion_free(&mut r, nb, d, &lead, &re);
        let fs = random_torsion_free(&mut r, nb, d, &lead, &rf);
        let e = r.gen_range(0..d);

        // the restricted form, summed directly from the coefficients
        let mut direct = vec![vec![Rational::zero(); nb]; nb];
        for j in 0..nb {
            for l in 0..nb {
                let mut s = Rational::zero();
                for i in 0..nv {
                    for k in 0..nv {
                        s += fs.alpha(i, j, e) * es.alpha(k, l, d) - es.alpha(i, j, e) * fs.alpha(k, l, d);
                    }
                }
                direct[j][l] += &s / int(2);
                direct[l][j] += s / int(2);
            }
        }
        let q = walls::quadratic_form(&es, &fs, e)?;
        let restricted = walls::restrict_symmetric(&q, nv, nb);
        ensure!(restricted == direct, "restricted form differs from the direct sum");
        let lin = walls::collapse_symmetric(&walls::linearize_symmetric(&es, &fs, e)?, nv, nb);
        ensure!(walls::positive_factor(&es, &fs)? == rationals(&lead), "positive factor is not the O_X leading vector");
        for j in 0..nb {
            for l in 0..nb {
                let prod = (int(lead[j]) * &lin[l] + int(lead[l]) * &lin[j]) / int(2);
                ensure!(restricted[j][l] == prod, "restricted form is not A·L at ({j},{l})");
            }
        }
        let poly = WallPolynomial::Quadratic(q);
        for _ in 0..5 {
            let hat: Vec<Rational> = (0..nb).map(|_| rand_pos(&mut r)).collect();
            let full: Vec<Rational> = (0..nv).flat_map(|_| hat.clone()).collect();
            let l: Rational = lin.iter().zip(&hat).map(|(c, s)| c * s).sum();
            ensure!(Sign::of(&poly.eval(&full)) == Sign::of(&l), "sign of the form and of L disagree");
            points += 1;
        }
    }
    Ok(format!("100 instances, {points} sign checks"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn c8_chamber_invariance() -> Outcome {
    let family = qsl::io::read_family(&data("synthetic_family.json"))?;
    ensure!(family.len() == 1, "the synthetic family has one pair");
    let pair = &family[0];
    let cone = Cone::orthant(2);
    let mut genuine = Vec::new();
    for e in 0..pair.ambient.dim() {
        let w = walls::wall_form(&pair.ambient, &pair.sub, e, &format!("e{e}"), Space::Symmetric, &cone)?;
        if w.is_genuine() {
            genuine.push(w.symmetric_linear().ok_or("genuine wall without a linear form")?);
        }
    }
    ensure!(genuine.len() == 1, "{} genuine walls", genuine.len());
    let l = &genuine[0];
    ensure!(&l[0] + &l[1] == int(0) && !l[0].is_zero(), "wall is not σ₁ = σ₂: {l:?}");
    let chambers = walls::enumerate_chambers(&genuine, &cone, false)?;
    ensure!(chambers.len() == 2, "{} chambers", chambers.len());

    // the sub destabilizes exactly when 2σ₁ + 2σ₂ > 3σ₁ + σ₂
    let oracle = |s: &[Rational]| (&s[1]).cmp(&s[0]);
    let mut r = rng(8);
    let mut verdicts = Vec::new();
    for ch in &chambers {
        let at_witness = walls::compare_at(pair, &[ch.witness.clone()])?;
        let mut found = 0;
        while found < 50 {
            let s = vec![rand_pos(&mut r), rand_pos(&mut r)];
            if walls::sign_vector(&s, &[WallPolynomial::Linear(l.clone())], &cone)? != ch.signs {
                continue;
            }
            let v = walls::compare_at(pair, &[s.clone()])?;
            ensure!(v == at_witness, "verdict changes inside a chamber at {s:?}");
            ensure!(v == oracle(&s), "verdict {v:?} at {s:?} differs from the slope comparison");
            found += 1;
        }
        verdicts.push(at_witness);
    }
    ensure!(verdicts[0] != verdicts[1], "no flip across the wall");
    for _ in 0..20 {
        let t = rand_pos(&mut r);
        let sp = StabilityPair::diagonal(vec![vec![t.clone(), t]])?;
        ensure!(sheaf::reduced_poly(&pair.sub, &sp)? == sheaf::reduced_poly(&pair.ambient, &sp)?, "reduced polynomials differ on the wall");
    }
    Ok(format!("2 chambers, verdicts {:?} / {:?}", verdicts[0], verdicts[1]))
}

fn c9_delta_and_tuples() -> Outcome {
    let mut r = rng(9);
    for _ in 0..100 {
        let (nv, nb, d) = (r.gen_range(1..=3), r.gen_range(1..=3), r.gen_range(0..=2));
        let alpha: Vec<Vec<Vec<Rational>>> = (0..nv)
            .map(|_| (0..nb).map(|_| (0..=d).map(|k| int(if k == d { r.gen_range(1..=4) } else { r.gen_range(-4..=4) })).collect()).collect())
            .collect();
        let es = NumericalQuiverSheaf::new(d, alpha, None)?;
        let sigma: Vec<Vec<Rational>> = (0..nv).map(|_| (0..nb).map(|_| rand_pos(&mut r)).collect()).collect();
        let i0 = r.gen_range(0..nv);
        let got = sheaf::reduced_poly(&sheaf::delta_vertex(&es, i0)?, &StabilityPair::diagonal(sigma.clone())?)?;
        let mut fact = int(1);
        let rank: Rational = (0..nb).map(|j| &sigma[i0][j] * es.alpha(i0, j, d)).sum();
        let mut want = Vec::new();
        for k in 0..=d {
            if k > 0 {
                fact *= int(k as i64);
            }
            let c: Rational = (0..nb).map(|j| &sigma[i0][j] * es.alpha(i0, j, k)).sum();
            want.push(c / &fact / &rank);
        }
        while want.last().is_some_and(|c| c.is_zero()) {
            want.pop();
        }
        ensure!(got.coeffs() == want.as_slice(), "p(δ(E)) = {:?}, expected {want:?}", got.coeffs());
    }

    let mut semistable = 0;
    for k in 0..100 {
        let model = random_model(&mut r, k % 2 == 0);
        let hat: Vec<Rational> = (0..model.bundle_degrees().len()).map(|_| rand_pos(&mut r)).collect();
        let v = symmetric_semistable(&model, &hat)?;
        let mut twists = model.twists().iter().flatten();
        let first = *twists.next().unwrap();
        let expected = twists.all(|&a| a == first);
        ensure!(v.semistable == expected, "verdict {} for twists {:?}", v.semistable, model.twists());
        if v.semistable {
            semistable += 1;
            check_subtuples(&model, &hat)?;
        }
    }
    Ok(format!("100 δ identities, 100 models ({semistable} semistable)"))
}

/// Constant term of the reduced polynomial of the tuple with the given
/// summands, for `σ_{ij} = σ̂_j`.
fn tuple_constant(twists: &[Vec<i64>], degrees: &[i64], hat: &[Rational]) -> Rational {
    let s: Rational = hat.iter().sum();
    let sb: Rational = hat.iter().zip(degrees).map(|(h, &b)| h * int(b)).sum();
    let chi: i64 = twists.iter().flatten().map(|a| a + 1).sum();
    let r: usize = twists.iter().map(|t| t.len()).sum();
    int(chi) * s / (int(r as i64) * sb)
}

fn check_subtuples(model: &P1SheafModel, hat: &[Rational]) -> Result<(), Box<dyn StdError>> {
    let twists = model.twists();
    let total: usize = twists.iter().map(|t| t.len()).sum();
    let whole = tuple_constant(twists, model.bundle_degrees(), hat);
    for mask in 1u32..(1 << total) {
        let mut bit = 0;
        let sub: Vec<Vec<i64>> = twists
            .iter()
            .map(|tw| {
                let v = tw.iter().enumerate().filter(|(s, _)| mask & (1 << (bit + s)) != 0).map(|(_, &a)| a).collect();
                bit += tw.len();
                v
            })
            .collect();
        let c = tuple_constant(&sub, model.bundle_degrees(), hat);
        ensure!(c <= whole, "subtuple {sub:?} destabilizes a semistable model");
    }
    Ok(())
}

fn c10_king_reduction() -> Outcome {
    let mut r = rng(10);
    let mut subs_checked = 0;
    for _ in 0..50 {
        let (rep, theta) = random_rep(&mut r);
        let shift = 1 - theta.iter().min().unwrap();
        let sigma: Vec<Vec<Rational>> = theta.iter().map(|&t| vec![int(t + shift)]).collect();
        let rho = vec![vec![int(1)]; theta.len()];
        let e = NumericalQuiverSheaf::from_dim_vector(rep.dims(), 1);
        let pe = sheaf::reduced_poly_weights(&e, &sigma, &rho)?;
        let mu = theta_slope(rep.dims(), &theta);
        let lattice = qsl::replab::enumerate_subreps(&rep, DEFAULT_CAP)?;
        let mut numerics = Vec::new();
        for s in lattice.iter().filter(|s| !s.is_zero()) {
            let f = NumericalQuiverSheaf::from_dim_vector(&s.dims(), 1);
            let pf = sheaf::reduced_poly_weights(&f, &sigma, &rho)?;
            ensure!(pf.lex_compare(&pe) == theta_slope(&s.dims(), &theta).cmp(&mu), "polynomial and θ comparisons disagree");
            numerics.push(f);
            subs_checked += 1;
        }
        let poly = check_subobjects(&e, &numerics, &sigma, &rho)?.kind;
        let king = is_semistable(&rep, &rationals(&theta), DEFAULT_CAP)?.kind;
        let matches = matches!(
            (poly, king),
            (SheafVerdictKind::Stable, StabilityKind::Stable)
                | (SheafVerdictKind::Semistable, StabilityKind::StrictlySemistable)
                | (SheafVerdictKind::Unstable, StabilityKind::Unstable)
        );
        ensure!(matches, "sheaf verdict {poly:?} vs King verdict {king:?}");
    }
    Ok(format!("50 instances, {subs_checked} subrepresentations compared"))
}

fn main() {
    type Criterion = (&'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("twisted quiver of A₂ with two rows", 1, c1_twisted_counts),
        ("acyclicity of twisted quivers", 10, c2_acyclicity),
        ("HN semistability vs exhaustive lattice", 60, c3_semistability_exhaustive),
        ("HN filtration properties and uniqueness", 120, c4_hn_properties),
        ("P¹ embedding dimensions, θ and I′₁", 30, c5_embedding),
        ("tightening", 60, c6_tighten),
        ("symmetric linearization of walls", 30, c7_symmetric_linearization),
        ("chamber invariance for the synthetic family", 10, c8_chamber_invariance),
        ("δ identity and tuple criterion", 30, c9_delta_and_tuples),
        ("King reduction at d = 0", 10, c10_king_reduction),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()).into())
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(*budget) => Err(format!("over budget ({detail})").into()),
            o => o,
        };
        let status = if outcome.is_ok() { "PASS" } else { "FAIL" };
        let detail = outcome.unwrap_or_else(|e| e.to_string());
        println!("{status} {:>2} {name} [{:.2}s / {budget}s]: {detail}", k + 1, elapsed.as_secs_f64());
        failed += usize::from(status == "FAIL");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
