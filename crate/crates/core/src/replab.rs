//! King stability of finite-field representations by exhaustive enumeration
//! of subrepresentations: semistability verdicts, Harder–Narasimhan and
//! Jordan–Hölder filtrations, S-equivalence.

use num::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Fp, Subspace};
use crate::rational::Rational;
use crate::rep::{FiniteFieldRep, Representation, SubRep};

/// Default bound on the number of subspace tuples an enumeration may visit.
pub const DEFAULT_CAP: u128 = 1_000_000;

/// Number of subspace tuples `Π_i #Gr(F_p^{d_i})`, saturating.
pub fn search_size(rep: &FiniteFieldRep) -> u128 {
    let p = rep.field().p();
    rep.dims()
        .iter()
        .fold(1u128, |acc, &d| acc.saturating_mul(Subspace::<Fp>::count_all(p, d)))
}

/// All subrepresentations, in lexicographic order of the per-vertex subspace
/// tuples (each vertex in the order of [`Subspace::enumerate_all`]).
pub fn enumerate_subreps(rep: &FiniteFieldRep, cap: u128) -> Result<Vec<SubRep<Fp>>> {
    let count = search_size(rep);
    if count > cap {
        return Err(Error::InstanceTooLarge { count, cap });
    }
    let f = *rep.field();
    let n = rep.dims().len();
    if n == 0 {
        return Ok(vec![rep.zero_subrep()]);
    }
    let candidates: Vec<Vec<Subspace<Fp>>> = rep.dims().iter().map(|&d| Subspace::enumerate_all(&f, d)).collect();
    // arrows to check once vertex v is assigned: those whose later endpoint is v
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ai, a) in rep.quiver().arrows().iter().enumerate() {
        checks[a.src.max(a.dst)].push(ai);
    }
    let found: Vec<Vec<SubRep<Fp>>> = candidates[0]
        .par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut chosen = vec![first.clone()];
            if consistent(rep, &checks[0], &chosen) {
                search(rep, &candidates, &checks, &mut chosen, &mut out);
            }
            out
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

fn consistent(rep: &FiniteFieldRep, arrows: &[usize], chosen: &[Subspace<Fp>]) -> bool {
    arrows.iter().all(|&ai| {
        let a = &rep.quiver().arrows()[ai];
        rep.map(ai)
            .iter()
            .all(|m| chosen[a.src].image_under(m).is_subspace_of(&chosen[a.dst]))
    })
}

fn search(
    rep: &FiniteFieldRep,
    candidates: &[Vec<Subspace<Fp>>],
    checks: &[Vec<usize>],
    chosen: &mut Vec<Subspace<Fp>>,
    out: &mut Vec<SubRep<Fp>>,
) {
    let v = chosen.len();
    if v == candidates.len() {
        out.push(SubRep::from_spaces_unchecked(chosen.clone()));
        return;
    }
    for s in &candidates[v] {
        chosen.push(s.clone());
        if consistent(rep, &checks[v], chosen) {
            search(rep, candidates, checks, chosen, out);
        }
        chosen.pop();
    }
}

/// King slope `Σ θ_i d_i / Σ d_i`.
pub fn slope_theta(dims: &[usize], theta: &[Rational]) -> Result<Rational> {
    if dims.len() != theta.len() {
        return Err(Error::ShapeMismatch(format!("θ has {} entries for {} vertices", theta.len(), dims.len())));
    }
    let total: usize = dims.iter().sum();
    if total == 0 {
        return Err(Error::UndefinedSlope);
    }
    let num: Rational = dims.iter().zip(theta).map(|(&d, t)| t * Rational::from_integer(d.into())).sum();
    Ok(num / Rational::from_integer(total.into()))
}

/// Slope of the subquotient `big / small` given by dimension vectors.
pub fn subquotient_slope(small: &[usize], big: &[usize], theta: &[Rational]) -> Result<Rational> {
    let diff: Vec<usize> = big.iter().zip(small).map(|(b, s)| b - s).collect();
    slope_theta(&diff, theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityKind {
    Stable,
    StrictlySemistable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub kind: StabilityKind,
    pub slope: Rational,
    /// For `Unstable`, the maximal destabilizer; for `StrictlySemistable`, a
    /// smallest proper subrepresentation of equal slope.
    pub witness: Option<SubRep<Fp>>,
    pub witness_slope: Option<Rational>,
}

impl Verdict {
    pub fn is_semistable(&self) -> bool {
        self.kind != StabilityKind::Unstable
    }
}

/// Index of the maximal destabilizer among the nonzero entries: maximal
/// slope, then maximal total dimension, then first in enumeration order.
fn maximal_destabilizer(subs: &[SubRep<Fp>], theta: &[Rational]) -> Result<Option<(usize, Rational)>> {
    let mut best: Option<(usize, Rational, usize)> = None;
    for (k, s) in subs.iter().enumerate() {
        if s.is_zero() {
            continue;
        }
        let mu = slope_theta(&s.dims(), theta)?;
        let dim = s.total_dim();
        let better = match &best {
            None => true,
            Some((_, bm, bd)) => mu > *bm || (mu == *bm && dim > *bd),
        };
        if better {
            best = Some((k, mu, dim));
        }
    }
    Ok(best.map(|(k, mu, _)| (k, mu)))
}

/// Smallest proper nonzero subrep of the given slope, first in enumeration order.
fn smallest_of_slope(subs: &[SubRep<Fp>], theta: &[Rational], mu: &Rational) -> Result<Option<usize>> {
    let mut best: Option<(usize, usize)> = None;
    for (k, s) in subs.iter().enumerate() {
        if s.is_zero() || s.is_full() {
            continue;
        }
        if slope_theta(&s.dims(), theta)? == *mu && best.is_none_or(|(_, d)| s.total_dim() < d) {
            best = Some((k, s.total_dim()));
        }
    }
    Ok(best.map(|(k, _)| k))
}

/// Decides θ-semistability from the enumerated subrepresentation lattice.
pub fn is_semistable(rep: &FiniteFieldRep, theta: &[Rational], cap: u128) -> Result<Verdict> {
    let slope = slope_theta(rep.dims(), theta)?;
    let subs = enumerate_subreps(rep, cap)?;
    verdict_from_lattice(&subs, theta, slope)
}

fn verdict_from_lattice(subs: &[SubRep<Fp>], theta: &[Rational], slope: Rational) -> Result<Verdict> {
    let mut max_proper: Option<Rational> = None;
    for s in subs.iter().filter(|s| !s.is_zero() && !s.is_full()) {
        let mu = slope_theta(&s.dims(), theta)?;
        if max_proper.as_ref().is_none_or(|m| mu > *m) {
            max_proper = Some(mu);
        }
    }
    match max_proper {
        Some(m) if m > slope => {
            let (k, mu) = maximal_destabilizer(subs, theta)?.expect("a proper destabilizer exists");
            Ok(Verdict { kind: StabilityKind::Unstable, slope, witness: Some(subs[k].clone()), witness_slope: Some(mu) })
        }
        Some(m) if m == slope => {
            let k = smallest_of_slope(subs, theta, &slope)?.expect("an equal-slope subrep exists");
            Ok(Verdict {
                kind: StabilityKind::StrictlySemistable,
                witness: Some(subs[k].clone()),
                witness_slope: Some(slope.clone()),
                slope,
            })
        }
        _ => Ok(Verdict { kind: StabilityKind::Stable, slope, witness: None, witness_slope: None }),
    }
}

/// A strictly increasing chain `0 ⊊ F¹ ⊊ … ⊊ Fʳ = M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    /// `F¹, …, Fʳ` (the zero step is implicit).
    pub steps: Vec<SubRep<Fp>>,
    /// `μ(F^k)`.
    pub step_slopes: Vec<Rational>,
    /// `μ(F^k / F^{k−1})`.
    pub factor_slopes: Vec<Rational>,
}

impl Filtration {
    pub fn len(&self) -> usize {
        self.steps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
    pub fn factor_dims(&self) -> Vec<Vec<usize>> {
        let mut prev = vec![0; self.steps.first().map_or(0, |s| s.spaces().len())];
        self.steps
            .iter()
            .map(|s| {
                let d = s.dims();
                let out = d.iter().zip(&prev).map(|(a, b)| a - b).collect();
                prev = d;
                out
            })
            .collect()
    }
}

fn push_step(f: &mut Filtration, step: SubRep<Fp>, theta: &[Rational]) -> Result<()> {
    let prev = f.steps.last().map_or(vec![0; step.spaces().len()], |s| s.dims());
    f.factor_slopes.push(subquotient_slope(&prev, &step.dims(), theta)?);
    f.step_slopes.push(slope_theta(&step.dims(), theta)?);
    f.steps.push(step);
    Ok(())
}

/// The Harder–Narasimhan filtration, built by repeatedly splitting off the
/// maximal destabilizer of the current quotient.
pub fn hn_filtration(rep: &FiniteFieldRep, theta: &[Rational], cap: u128) -> Result<Filtration> {
    if theta.len() != rep.dims().len() {
        return Err(Error::ShapeMismatch(format!("θ has {} entries for {} vertices", theta.len(), rep.dims().len())));
    }
    let mut filt = Filtration { steps: Vec::new(), step_slopes: Vec::new(), factor_slopes: Vec::new() };
    let mut base = rep.zero_subrep();
    while !base.is_full() {
        let quotient = rep.quotient(&base);
        let subs = enumerate_subreps(&quotient, cap)?;
        let (k, _) = maximal_destabilizer(&subs, theta)?.expect("nonzero quotient has a nonzero subrep");
        base = rep.lift_from_quotient(&base, &subs[k]);
        push_step(&mut filt, base.clone(), theta)?;
    }
    Ok(filt)
}

/// A Jordan–Hölder filtration with its stable factors and their direct sum.
#[derive(Debug, Clone)]
pub struct JordanHolder {
    pub filtration: Filtration,
    pub factors: Vec<FiniteFieldRep>,
    pub gr: FiniteFieldRep,
}

/// Jordan–Hölder filtration of a semistable representation: each step adds a
/// smallest equal-slope subrepresentation of the current quotient, which is
/// therefore stable.
pub fn jh_and_gr(rep: &FiniteFieldRep, theta: &[Rational], cap: u128) -> Result<JordanHolder> {
    let verdict = is_semistable(rep, theta, cap)?;
    if !verdict.is_semistable() {
        return Err(Error::NotSemistable);
    }
    let mu = verdict.slope;
    let mut filt = Filtration { steps: Vec::new(), step_slopes: Vec::new(), factor_slopes: Vec::new() };
    let mut factors = Vec::new();
    let mut base = rep.zero_subrep();
    while !base.is_full() {
        let quotient = rep.quotient(&base);
        let subs = enumerate_subreps(&quotient, cap)?;
        let piece = match smallest_of_slope(&subs, theta, &mu)? {
            Some(k) => subs[k].clone(),
            None => quotient.full_subrep(),
        };
        factors.push(quotient.restrict(&piece));
        base = rep.lift_from_quotient(&base, &piece);
        push_step(&mut filt, base.clone(), theta)?;
    }
    let zero = Representation::zero_maps(*rep.field(), rep.quiver().clone(), vec![0; rep.dims().len()])?;
    let gr = factors.iter().try_fold(zero, |acc, f| acc.direct_sum(f))?;
    Ok(JordanHolder { filtration: filt, factors, gr })
}

/// Isomorphism of θ-stable representations of equal slope: by Schur's lemma
/// any nonzero homomorphism between them is an isomorphism.
fn stable_isomorphic(a: &FiniteFieldRep, b: &FiniteFieldRep) -> Result<bool> {
    Ok(a.dims() == b.dims() && !a.hom_basis(b)?.is_empty())
}

/// S-equivalence: equal multisets of Jordan–Hölder factors up to isomorphism.
pub fn s_equivalent(m1: &FiniteFieldRep, m2: &FiniteFieldRep, theta: &[Rational], cap: u128) -> Result<bool> {
    let a = jh_and_gr(m1, theta, cap)?;
    let b = jh_and_gr(m2, theta, cap)?;
    same_factors(&a.factors, &b.factors)
}

/// Compares two lists of stable representations as multisets up to isomorphism.
pub fn same_factors(a: &[FiniteFieldRep], b: &[FiniteFieldRep]) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let mut used = vec![false; b.len()];
    for x in a {
        let mut matched = false;
        for (k, y) in b.iter().enumerate() {
            if !used[k] && stable_isomorphic(x, y)? {
                used[k] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Verdict with θ = 0, where every nonzero object has slope zero.
pub fn zero_theta(n: usize) -> Vec<Rational> {
    vec![Rational::zero(); n]
}
