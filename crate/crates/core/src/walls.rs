//! Walls in the space of stability weights and the chambers they cut out of a
//! polyhedral cone.
//!
//! Weights `σ ∈ ℚ^{Q₀×N}` are flattened row-major (`σ_{ij}` at `i·N + j`). On the
//! symmetric locus `σ_{ij} = σ̂_j` the coordinates are `σ̂ ∈ ℚ^N`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{combinations, Matrix, QQ};
use crate::lp::{maximize, Cmp, Constraint, LpOutcome};
use crate::rational::{primitive_ray, to_decimal, Rational};
use crate::sheaf::{reduced_poly, NumericalQuiverSheaf, StabilityPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Neg,
    Zero,
}

impl Sign {
    pub fn of(q: &Rational) -> Sign {
        if q.is_positive() {
            Sign::Pos
        } else if q.is_negative() {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Pos => "+",
            Sign::Neg => "-",
            Sign::Zero => "0",
        }
    }

    fn factor(self) -> Rational {
        match self {
            Sign::Pos => Rational::one(),
            Sign::Neg => -Rational::one(),
            Sign::Zero => Rational::zero(),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match String::deserialize(d)?.as_str() {
            "+" => Ok(Sign::Pos),
            "-" => Ok(Sign::Neg),
            "0" => Ok(Sign::Zero),
            other => Err(serde::de::Error::custom(format!("invalid sign {other:?}"))),
        }
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn quad(s: &[Vec<Rational>], x: &[Rational], y: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (i, row) in s.iter().enumerate() {
        if x[i].is_zero() {
            continue;
        }
        acc += &x[i] * dot(row, y);
    }
    acc
}

/// A wall equation in some coordinate space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WallPolynomial {
    Linear(Vec<Rational>),
    /// Symmetric coefficient matrix.
    Quadratic(Vec<Vec<Rational>>),
}

impl WallPolynomial {
    pub fn dim(&self) -> usize {
        match self {
            WallPolynomial::Linear(l) => l.len(),
            WallPolynomial::Quadratic(q) => q.len(),
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        match self {
            WallPolynomial::Linear(l) => dot(l, x),
            WallPolynomial::Quadratic(q) => quad(q, x, x),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            WallPolynomial::Linear(l) => l.iter().all(|x| x.is_zero()),
            WallPolynomial::Quadratic(q) => q.iter().flatten().all(|x| x.is_zero()),
        }
    }
}

/// A closed polyhedral cone `{σ ≥ 0 : a·σ ≥ 0 for every listed a}` with
/// nonempty interior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    dim: usize,
    inequalities: Vec<Vec<Rational>>,
}

/// Maximizes the margin `t` of `g·σ ≥ t` (strict rows, plus `σ_i ≥ t`) with
/// `g·σ = 0` for equality rows and `Σσ = 1`. Returns the point when `t > 0`.
fn max_margin(dim: usize, strict: &[Vec<Rational>], equal: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    let mut rows = Vec::new();
    let with_t = |g: &[Rational], t: i64| {
        let mut r = g.to_vec();
        r.push(Rational::from_integer(t.into()));
        r
    };
    for g in strict {
        rows.push(Constraint::new(with_t(g, -1), Cmp::Ge, Rational::zero()));
    }
    for i in 0..dim {
        let mut e = vec![Rational::zero(); dim];
        e[i] = Rational::one();
        rows.push(Constraint::new(with_t(&e, -1), Cmp::Ge, Rational::zero()));
    }
    for g in equal {
        rows.push(Constraint::new(with_t(g, 0), Cmp::Eq, Rational::zero()));
    }
    rows.push(Constraint::new(with_t(&vec![Rational::one(); dim], 0), Cmp::Eq, Rational::one()));
    let mut obj = vec![Rational::zero(); dim];
    obj.push(Rational::one());
    match maximize(&obj, &rows) {
        LpOutcome::Optimal { mut x, value } if value.is_positive() => {
            x.truncate(dim);
            Some(x)
        }
        _ => None,
    }
}

impl Cone {
    pub fn new(dim: usize, inequalities: Vec<Vec<Rational>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("cone dimension must be positive".into()));
        }
        if inequalities.iter().any(|a| a.len() != dim) {
            return Err(Error::ShapeMismatch(format!("cone inequalities must have {dim} entries")));
        }
        let cone = Cone { dim, inequalities };
        if max_margin(dim, &cone.inequalities, &[]).is_none() {
            return Err(Error::DegenerateCone);
        }
        Ok(cone)
    }

    /// The closed non-negative orthant.
    pub fn orthant(dim: usize) -> Self {
        Cone { dim, inequalities: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn inequalities(&self) -> &[Vec<Rational>] {
        &self.inequalities
    }

    fn all_constraints(&self) -> Vec<Vec<Rational>> {
        let mut out = self.inequalities.clone();
        for i in 0..self.dim {
            let mut e = vec![Rational::zero(); self.dim];
            e[i] = Rational::one();
            out.push(e);
        }
        out
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim && self.all_constraints().iter().all(|g| !dot(g, x).is_negative())
    }

    /// Strictly inside: every inequality and every coordinate positive.
    pub fn contains_strictly(&self, x: &[Rational]) -> bool {
        x.len() == self.dim && self.all_constraints().iter().all(|g| dot(g, x).is_positive())
    }

    /// A deterministic interior point as a primitive integer vector.
    pub fn interior_point(&self) -> Vec<Rational> {
        primitive_ray(&max_margin(self.dim, &self.inequalities, &[]).expect("cone has interior"))
    }

    /// True iff the cone meets the boundary of the orthant only at the origin.
    pub fn separated_from_boundary(&self) -> bool {
        (0..self.dim).all(|i| {
            let mut rows: Vec<Constraint> = self
                .inequalities
                .iter()
                .map(|g| Constraint::new(g.clone(), Cmp::Ge, Rational::zero()))
                .collect();
            let mut e = vec![Rational::zero(); self.dim];
            e[i] = Rational::one();
            rows.push(Constraint::new(e, Cmp::Eq, Rational::zero()));
            rows.push(Constraint::new(vec![Rational::one(); self.dim], Cmp::Le, Rational::one()));
            match maximize(&vec![Rational::one(); self.dim], &rows) {
                LpOutcome::Optimal { value, .. } => value.is_zero(),
                _ => true,
            }
        })
    }

    /// Extreme rays as primitive integer vectors, sorted.
    pub fn extreme_rays(&self) -> Result<Vec<Vec<Rational>>> {
        let d = self.dim;
        if d == 1 {
            return Ok(vec![vec![Rational::one()]]);
        }
        let cons = self.all_constraints();
        let subsets = combinations(cons.len(), d - 1);
        if subsets.len() > 200_000 {
            return Err(Error::InstanceTooLarge { count: subsets.len() as u128, cap: 200_000 });
        }
        let mut rays: Vec<Vec<Rational>> = Vec::new();
        for s in subsets {
            let rows: Vec<Vec<Rational>> = s.iter().map(|&k| cons[k].clone()).collect();
            let m = Matrix::from_rows(&QQ, d - 1, d, rows)?;
            let ker = m.kernel();
            if ker.dim() != 1 {
                continue;
            }
            let v = ker.basis()[0].clone();
            let neg: Vec<Rational> = v.iter().map(|x| -x.clone()).collect();
            for cand in [v, neg] {
                if self.contains(&cand) {
                    let r = primitive_ray(&cand);
                    if !rays.contains(&r) {
                        rays.push(r);
                    }
                }
            }
        }
        rays.sort();
        Ok(rays)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Triviality {
    /// The form has constant nonzero sign on the interior of the cone.
    NeverZeroOnCone,
    IdenticallyZero,
    Genuine,
}

/// Classification together with whether it is proven.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub triviality: Triviality,
    /// False only for quadratic forms the procedure could not decide; those
    /// are conservatively reported as genuine.
    pub certified: bool,
    /// Sign on the interior for never-zero forms.
    pub sign: Option<Sign>,
}

/// Decides how a wall polynomial meets the interior of the cone.
///
/// Linear forms: genuine iff both open sign conditions are feasible inside.
/// Quadratic forms: writing interior points as positive combinations of the
/// extreme rays `R_k`, the form is `Σ λ_k λ_l B(R_k, R_l)`; if every `B` has one
/// sign (and some is nonzero) the form never vanishes inside. A genuine wall
/// is certified by exhibiting interior points of both signs.
pub fn classify(poly: &WallPolynomial, cone: &Cone) -> Result<Classification> {
    if poly.dim() != cone.dim() {
        return Err(Error::ShapeMismatch("wall and cone live in different dimensions".into()));
    }
    if poly.is_zero() {
        return Ok(Classification { triviality: Triviality::IdenticallyZero, certified: true, sign: None });
    }
    match poly {
        WallPolynomial::Linear(l) => {
            let neg: Vec<Rational> = l.iter().map(|x| -x.clone()).collect();
            let mut strict = cone.inequalities.clone();
            strict.push(l.clone());
            let pos = max_margin(cone.dim, &strict, &[]).is_some();
            *strict.last_mut().unwrap() = neg;
            let negf = max_margin(cone.dim, &strict, &[]).is_some();
            Ok(match (pos, negf) {
                (true, true) => Classification { triviality: Triviality::Genuine, certified: true, sign: None },
                (true, false) => Classification { triviality: Triviality::NeverZeroOnCone, certified: true, sign: Some(Sign::Pos) },
                (false, true) => Classification { triviality: Triviality::NeverZeroOnCone, certified: true, sign: Some(Sign::Neg) },
                (false, false) => unreachable!("a cone with interior meets a side of every nonzero hyperplane"),
            })
        }
        WallPolynomial::Quadratic(s) => classify_quadratic(s, cone),
    }
}

fn classify_quadratic(s: &[Vec<Rational>], cone: &Cone) -> Result<Classification> {
    let rays = cone.extreme_rays()?;
    let b: Vec<Vec<Rational>> = rays.iter().map(|r| rays.iter().map(|t| quad(s, r, t)).collect()).collect();
    let flat = || b.iter().flatten();
    if flat().all(|x| !x.is_negative()) && flat().any(|x| x.is_positive()) {
        return Ok(Classification { triviality: Triviality::NeverZeroOnCone, certified: true, sign: Some(Sign::Pos) });
    }
    if flat().all(|x| !x.is_positive()) && flat().any(|x| x.is_negative()) {
        return Ok(Classification { triviality: Triviality::NeverZeroOnCone, certified: true, sign: Some(Sign::Neg) });
    }
    let genuine = Classification { triviality: Triviality::Genuine, certified: true, sign: None };
    let center: Vec<Rational> = (0..cone.dim).map(|c| rays.iter().map(|r| r[c].clone()).sum()).collect();
    let mut seen_pos = false;
    let mut seen_neg = false;
    let mut note = |v: Rational| {
        seen_pos |= v.is_positive();
        seen_neg |= v.is_negative();
        seen_pos && seen_neg
    };
    let axpy = |a: &Rational, x: &[Rational], y: &[Rational]| -> Vec<Rational> { x.iter().zip(y).map(|(u, v)| a * u + v).collect() };
    if note(quad(s, &center, &center)) {
        return Ok(genuine);
    }
    // points pushed from the center toward rays and pairs of rays stay interior
    for k in [1i64, 10, 100, 10_000] {
        let k = Rational::from_integer(k.into());
        for i in 0..rays.len() {
            for j in i..rays.len() {
                let dir: Vec<Rational> = rays[i].iter().zip(&rays[j]).map(|(a, b)| a + b).collect();
                let p = axpy(&k, &dir, &center);
                if note(quad(s, &p, &p)) {
                    return Ok(genuine);
                }
            }
        }
    }
    // exact minimum of the form on each two-ray face, nudged into the interior
    for i in 0..rays.len() {
        for j in 0..rays.len() {
            if i == j || b[j][j].is_zero() || !b[i][j].is_negative() && !b[i][j].is_positive() {
                continue;
            }
            // q(R_i + t R_j) = B_ii + 2 t B_ij + t² B_jj is extremal at t = −B_ij / B_jj
            let t = -&b[i][j] / &b[j][j];
            if !t.is_positive() {
                continue;
            }
            let face = axpy(&t, &rays[j], &rays[i]);
            let mut eps = Rational::one();
            for _ in 0..64 {
                let p = axpy(&eps, &center, &face);
                if note(quad(s, &p, &p)) {
                    return Ok(genuine);
                }
                eps /= Rational::from_integer(16.into());
            }
        }
    }
    Ok(Classification { triviality: Triviality::Genuine, certified: false, sign: None })
}

/// Which coordinates the walls and the cone use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Space {
    /// `σ ∈ ℚ^{Q₀×N}`.
    Full,
    /// `σ̂ ∈ ℚ^N` with `σ_{ij} = σ̂_j`.
    Symmetric,
}

/// The wall `W_{e,F}` of a subobject candidate `F` of `E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallForm {
    pub e: usize,
    pub label: String,
    pub vertices: usize,
    pub bundles: usize,
    /// Symmetric `(Q₀N) × (Q₀N)` matrix of the quadratic form in `σ`.
    pub quadratic: Vec<Vec<Rational>>,
    /// `c_{ij} = rk(E) α_e^{L_j}(F_i) − rk(F) α_e^{L_j}(E_i)` in torsion-free mode.
    pub linear: Option<Vec<Rational>>,
    pub space: Space,
    pub classification: Classification,
}

impl WallForm {
    /// The wall equation in the coordinates of its space: the linear form on
    /// the symmetric locus when available, the quadratic form otherwise.
    pub fn polynomial(&self) -> WallPolynomial {
        match self.space {
            Space::Full => WallPolynomial::Quadratic(self.quadratic.clone()),
            Space::Symmetric => match &self.linear {
                Some(l) => WallPolynomial::Linear(collapse_symmetric(l, self.vertices, self.bundles)),
                None => WallPolynomial::Quadratic(restrict_symmetric(&self.quadratic, self.vertices, self.bundles)),
            },
        }
    }

    /// The linear form in `σ̂` on the symmetric locus.
    pub fn symmetric_linear(&self) -> Option<Vec<Rational>> {
        self.linear.as_ref().map(|l| collapse_symmetric(l, self.vertices, self.bundles))
    }

    pub fn triviality(&self) -> Triviality {
        self.classification.triviality
    }

    pub fn is_genuine(&self) -> bool {
        self.triviality() == Triviality::Genuine
    }
}

fn check_pair(e: &NumericalQuiverSheaf, f: &NumericalQuiverSheaf) -> Result<()> {
    if e.dim() != f.dim() || e.num_vertices() != f.num_vertices() || e.num_bundles() != f.num_bundles() {
        return Err(Error::ShapeMismatch("E and F must share dimension, vertices and bundles".into()));
    }
    Ok(())
}

/// The symmetric matrix of
/// `Σ σ_{ij} σ_{kl} (α_e^{L_j}(F_i) α_d^{L_l}(E_k) − α_e^{L_j}(E_i) α_d^{L_l}(F_k))`.
pub fn quadratic_form(e_sheaf: &NumericalQuiverSheaf, f_sheaf: &NumericalQuiverSheaf, e: usize) -> Result<Vec<Vec<Rational>>> {
    check_pair(e_sheaf, f_sheaf)?;
    let d = e_sheaf.dim();
    if e >= d {
        return Err(Error::InvalidParameter(format!("e = {e} must lie in 0..{d}")));
    }
    let (nv, nb) = (e_sheaf.num_vertices(), e_sheaf.num_bundles());
    let idx = |i: usize, j: usize| i * nb + j;
    let dim = nv * nb;
    let mut c = vec![vec![Rational::zero(); dim]; dim];
    for i in 0..nv {
        for j in 0..nb {
            for k in 0..nv {
                for l in 0..nb {
                    c[idx(i, j)][idx(k, l)] = f_sheaf.alpha(i, j, e) * e_sheaf.alpha(k, l, d) - e_sheaf.alpha(i, j, e) * f_sheaf.alpha(k, l, d);
                }
            }
        }
    }
    let half = Rational::new(1.into(), 2.into());
    Ok((0..dim).map(|a| (0..dim).map(|b| (&c[a][b] + &c[b][a]) * &half).collect()).collect())
}

/// The linear factor of the wall on the symmetric locus (torsion-free data),
/// as coefficients `c_{ij}` of `σ_{ij}`.
pub fn linearize_symmetric(e_sheaf: &NumericalQuiverSheaf, f_sheaf: &NumericalQuiverSheaf, e: usize) -> Result<Vec<Rational>> {
    check_pair(e_sheaf, f_sheaf)?;
    if e >= e_sheaf.dim() {
        return Err(Error::InvalidParameter(format!("e = {e} must lie in 0..{}", e_sheaf.dim())));
    }
    let (re, rf) = (e_sheaf.total_rank()?, f_sheaf.total_rank()?);
    let mut out = Vec::with_capacity(e_sheaf.num_vertices() * e_sheaf.num_bundles());
    for i in 0..e_sheaf.num_vertices() {
        for j in 0..e_sheaf.num_bundles() {
            out.push(&re * f_sheaf.alpha(i, j, e) - &rf * e_sheaf.alpha(i, j, e));
        }
    }
    Ok(out)
}

/// `α_d^{L_l}(O_X)`, read off as `α_d^{L_l}(E_k) / rk(E_k)` and checked to be
/// the same for every vertex of positive rank in `E` and `F`.
pub fn structure_sheaf_leading(e_sheaf: &NumericalQuiverSheaf, f_sheaf: &NumericalQuiverSheaf) -> Result<Vec<Rational>> {
    check_pair(e_sheaf, f_sheaf)?;
    let d = e_sheaf.dim();
    let mut out: Option<Vec<Rational>> = None;
    for s in [e_sheaf, f_sheaf] {
        let ranks = s.ranks().ok_or(Error::MissingRanks)?;
        for (i, r) in ranks.iter().enumerate() {
            if r.is_zero() {
                if !s.is_zero_at(i) {
                    return Err(Error::Precondition(format!("vertex {i} has rank 0 but is nonzero")));
                }
                continue;
            }
            let a: Vec<Rational> = (0..s.num_bundles()).map(|l| s.alpha(i, l, d) / r).collect();
            match &out {
                None => out = Some(a),
                Some(prev) if *prev == a => {}
                Some(_) => {
                    return Err(Error::Precondition("leading coefficients are not rank multiples of a common vector".into()))
                }
            }
        }
    }
    out.ok_or_else(|| Error::Precondition("both sheaves are zero".into()))
}

/// `A(σ̂) = Σ_l σ̂_l α_d^{L_l}(O_X)`: on the symmetric locus the quadratic form
/// equals `A(σ̂) · L(σ̂)` with `L` the collapsed linear form.
pub fn positive_factor(e_sheaf: &NumericalQuiverSheaf, f_sheaf: &NumericalQuiverSheaf) -> Result<Vec<Rational>> {
    structure_sheaf_leading(e_sheaf, f_sheaf)
}

/// Restricts a `(Q₀N)`-square form to `σ_{ij} = σ̂_j`.
pub fn restrict_symmetric(q: &[Vec<Rational>], vertices: usize, bundles: usize) -> Vec<Vec<Rational>> {
    let mut r = vec![vec![Rational::zero(); bundles]; bundles];
    for i in 0..vertices {
        for j in 0..bundles {
            for k in 0..vertices {
                for l in 0..bundles {
                    r[j][l] += &q[i * bundles + j][k * bundles + l];
                }
            }
        }
    }
    r
}

/// `ĉ_j = Σ_i c_{ij}`.
pub fn collapse_symmetric(c: &[Rational], vertices: usize, bundles: usize) -> Vec<Rational> {
    (0..bundles).map(|j| (0..vertices).map(|i| c[i * bundles + j].clone()).sum()).collect()
}

/// Builds and classifies the wall `W_{e,F}` against a cone in the given space.
pub fn wall_form(
    e_sheaf: &NumericalQuiverSheaf,
    f_sheaf: &NumericalQuiverSheaf,
    e: usize,
    label: &str,
    space: Space,
    cone: &Cone,
) -> Result<WallForm> {
    let quadratic = quadratic_form(e_sheaf, f_sheaf, e)?;
    let linear = match (e_sheaf.ranks(), f_sheaf.ranks()) {
        (Some(_), Some(_)) if structure_sheaf_leading(e_sheaf, f_sheaf).is_ok() => Some(linearize_symmetric(e_sheaf, f_sheaf, e)?),
        _ => None,
    };
    let mut w = WallForm {
        e,
        label: label.to_string(),
        vertices: e_sheaf.num_vertices(),
        bundles: e_sheaf.num_bundles(),
        quadratic,
        linear,
        space,
        classification: Classification { triviality: Triviality::Genuine, certified: false, sign: None },
    };
    w.classification = classify(&w.polynomial(), cone)?;
    Ok(w)
}

/// Exact signs of the walls at a point strictly inside the cone.
pub fn sign_vector(x: &[Rational], walls: &[WallPolynomial], cone: &Cone) -> Result<Vec<Sign>> {
    if x.len() != cone.dim() || walls.iter().any(|w| w.dim() != x.len()) {
        return Err(Error::ShapeMismatch("point, walls and cone differ in dimension".into()));
    }
    if !cone.contains_strictly(x) {
        return Err(Error::OutsideCone);
    }
    Ok(walls.iter().map(|w| Sign::of(&w.eval(x))).collect())
}

/// A cell of the arrangement inside the cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    pub signs: Vec<Sign>,
    /// Primitive integer point in the relative interior of the cell.
    pub witness: Vec<Rational>,
    pub full_dimensional: bool,
    /// Full-dimensional neighbours: (chamber index, walls crossed).
    pub adjacent: Vec<(usize, Vec<usize>)>,
}

fn signed_rows(walls: &[Vec<Rational>], signs: &[Sign]) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
    let mut strict = Vec::new();
    let mut equal = Vec::new();
    for (w, s) in walls.iter().zip(signs) {
        match s {
            Sign::Zero => equal.push(w.clone()),
            _ => strict.push(w.iter().map(|x| x * s.factor()).collect()),
        }
    }
    (strict, equal)
}

fn cell_point(walls: &[Vec<Rational>], signs: &[Sign], cone: &Cone) -> Option<Vec<Rational>> {
    let (mut strict, equal) = signed_rows(&walls[..signs.len()], signs);
    strict.extend(cone.inequalities.iter().cloned());
    max_margin(cone.dim, &strict, &equal)
}

/// Enumerates the cells of a linear arrangement inside the cone by growing
/// sign vectors one wall at a time and keeping the feasible ones. Full
/// dimensional chambers come first; cells on walls only when requested.
pub fn enumerate_chambers(walls: &[Vec<Rational>], cone: &Cone, lower_dim: bool) -> Result<Vec<Chamber>> {
    if walls.iter().any(|w| w.len() != cone.dim()) {
        return Err(Error::ShapeMismatch("walls and cone differ in dimension".into()));
    }
    if let Some(k) = walls.iter().position(|w| w.iter().all(|x| x.is_zero())) {
        return Err(Error::InvalidParameter(format!("wall {k} is identically zero")));
    }
    let branches: &[Sign] = if lower_dim { &[Sign::Pos, Sign::Neg, Sign::Zero] } else { &[Sign::Pos, Sign::Neg] };
    let mut partial: Vec<Vec<Sign>> = vec![Vec::new()];
    for _ in walls {
        partial = partial
            .into_iter()
            .flat_map(|p| {
                branches.iter().map(move |&s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .filter(|q| cell_point(walls, q, cone).is_some())
            .collect();
    }
    let mut cells: Vec<Chamber> = partial
        .into_iter()
        .map(|signs| {
            let witness = primitive_ray(&cell_point(walls, &signs, cone).expect("feasible"));
            let full_dimensional = !signs.contains(&Sign::Zero);
            Chamber { signs, witness, full_dimensional, adjacent: Vec::new() }
        })
        .collect();
    cells.sort_by_key(|c| !c.full_dimensional);

    // walls grouped by the hyperplane they define
    let mut planes: BTreeMap<Vec<Rational>, Vec<usize>> = BTreeMap::new();
    for (k, w) in walls.iter().enumerate() {
        let mut p = primitive_ray(w);
        if p.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            p = p.into_iter().map(|x| -x).collect();
        }
        planes.entry(p).or_default().push(k);
    }
    let full: Vec<usize> = (0..cells.len()).filter(|&c| cells[c].full_dimensional).collect();
    for &c in &full {
        let mut adj = Vec::new();
        for (plane, members) in &planes {
            let others: Vec<usize> = (0..walls.len()).filter(|k| !members.contains(k)).collect();
            let mut strict: Vec<Vec<Rational>> =
                others.iter().map(|&k| walls[k].iter().map(|x| x * cells[c].signs[k].factor()).collect()).collect();
            strict.extend(cone.inequalities.iter().cloned());
            if max_margin(cone.dim, &strict, std::slice::from_ref(plane)).is_none() {
                continue;
            }
            let mut flipped = cells[c].signs.clone();
            for &k in members {
                flipped[k] = if flipped[k] == Sign::Pos { Sign::Neg } else { Sign::Pos };
            }
            if let Some(&o) = full.iter().find(|&&o| cells[o].signs == flipped) {
                adj.push((o, members.clone()));
            }
        }
        adj.sort();
        cells[c].adjacent = adj;
    }
    Ok(cells)
}

/// A pair `(E, F)` whose comparison is tracked across parameter space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyPair {
    pub label: String,
    pub ambient: NumericalQuiverSheaf,
    pub sub: NumericalQuiverSheaf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareRow {
    pub label: String,
    /// `p_F` compared with `p_E` at `σ` and at `σ′`.
    pub at_sigma: Ordering,
    pub at_sigma_prime: Ordering,
    pub flipped: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub signs_sigma: Vec<Sign>,
    pub signs_sigma_prime: Vec<Sign>,
    pub same_sign_vector: bool,
}

impl CompareReport {
    pub fn flips(&self) -> usize {
        self.rows.iter().filter(|r| r.flipped).count()
    }
}

/// `p^σ_F` versus `p^σ_E` with `ρ = σ`.
pub fn compare_at(pair: &FamilyPair, sigma: &[Vec<Rational>]) -> Result<Ordering> {
    let sp = StabilityPair::diagonal(sigma.to_vec())?;
    Ok(reduced_poly(&pair.sub, &sp)?.lex_compare(&reduced_poly(&pair.ambient, &sp)?))
}

/// Compares every pair at two strictly positive weights and records the
/// signs of all walls `W_{e,F}` (`0 ≤ e < d`) at both points.
pub fn compare_across(sigma: &[Vec<Rational>], sigma_prime: &[Vec<Rational>], family: &[FamilyPair]) -> Result<CompareReport> {
    for s in [sigma, sigma_prime] {
        if s.iter().flatten().any(|x| !x.is_positive()) {
            return Err(Error::InvalidParameter("comparison points must be strictly positive".into()));
        }
    }
    let flat = |s: &[Vec<Rational>]| s.iter().flatten().cloned().collect::<Vec<_>>();
    let (x, y) = (flat(sigma), flat(sigma_prime));
    let mut rows = Vec::with_capacity(family.len());
    let mut signs_sigma = Vec::new();
    let mut signs_sigma_prime = Vec::new();
    for pair in family {
        let a = compare_at(pair, sigma)?;
        let b = compare_at(pair, sigma_prime)?;
        rows.push(CompareRow { label: pair.label.clone(), at_sigma: a, at_sigma_prime: b, flipped: a != b });
        for e in 0..pair.ambient.dim() {
            let q = quadratic_form(&pair.ambient, &pair.sub, e)?;
            signs_sigma.push(Sign::of(&quad(&q, &x, &x)));
            signs_sigma_prime.push(Sign::of(&quad(&q, &y, &y)));
        }
    }
    let same_sign_vector = signs_sigma == signs_sigma_prime;
    Ok(CompareReport { rows, signs_sigma, signs_sigma_prime, same_sign_vector })
}

/// The zero set of a wall on the slice `σ = x·u + y·v`, `(x, y) ∈ [0, 1]²`:
/// a segment from the origin to the boundary of the unit square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub wall: String,
    pub end: (Rational, Rational),
    /// False when the direction is an irrational root approximated by bisection.
    pub exact: bool,
}

fn sqrt_exact(q: &Rational) -> Option<Rational> {
    let (n, d) = (q.numer(), q.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| Rational::new(sn, sd))
}

/// `⌊√q · 10^k⌋ / 10^k`.
fn sqrt_approx(q: &Rational, k: u32) -> Rational {
    let scale = num::pow(BigInt::from(10), k as usize);
    let prod = q.numer() * q.denom() * &scale * &scale;
    Rational::new(prod.sqrt(), q.denom() * scale)
}

fn square_endpoint(dx: &Rational, dy: &Rational) -> (Rational, Rational) {
    let m = if dx > dy { dx.clone() } else { dy.clone() };
    (dx / &m, dy / &m)
}

/// Traces of the walls on a two-dimensional slice through the cone.
pub fn section_traces(
    walls: &[(String, WallPolynomial)],
    u: &[Rational],
    v: &[Rational],
    cone: &Cone,
    precision: u32,
) -> Result<Vec<Trace>> {
    if u.len() != cone.dim() || v.len() != cone.dim() {
        return Err(Error::ShapeMismatch("slice vectors must match the cone dimension".into()));
    }
    if !cone.contains(u) || !cone.contains(v) {
        return Err(Error::OutsideCone);
    }
    let mut out = Vec::new();
    for (name, w) in walls {
        if w.dim() != u.len() {
            return Err(Error::ShapeMismatch(format!("wall {name} has the wrong dimension")));
        }
        // directions (dx, dy) ≥ 0 along which the restricted form vanishes
        let mut dirs: Vec<(Rational, Rational, bool)> = Vec::new();
        match w {
            WallPolynomial::Linear(l) => {
                let (a, b) = (dot(l, u), dot(l, v));
                if a.is_zero() && b.is_zero() {
                    continue;
                }
                for (dx, dy) in [(b.clone(), -a.clone()), (-b, a)] {
                    if !dx.is_negative() && !dy.is_negative() {
                        dirs.push((dx, dy, true));
                        break;
                    }
                }
            }
            WallPolynomial::Quadratic(s) => {
                let (a, b, c) = (quad(s, u, u), quad(s, u, v), quad(s, v, v));
                if a.is_zero() && b.is_zero() && c.is_zero() {
                    continue;
                }
                // A + 2B r + C r² = 0 with r = y / x; x = 0 is a root iff C = 0
                if c.is_zero() {
                    dirs.push((Rational::zero(), Rational::one(), true));
                    if !b.is_zero() {
                        let r = -&a / (Rational::from_integer(2.into()) * &b);
                        if !r.is_negative() {
                            dirs.push((Rational::one(), r, true));
                        }
                    }
                } else {
                    let disc = &b * &b - &a * &c;
                    if !disc.is_negative() {
                        let (root, exact) = match sqrt_exact(&disc) {
                            Some(r) => (r, true),
                            None => (sqrt_approx(&disc, precision + 6), false),
                        };
                        for sgn in [1i64, -1] {
                            let r = (-&b + Rational::from_integer(sgn.into()) * &root) / &c;
                            if !r.is_negative() {
                                dirs.push((Rational::one(), r, exact));
                            }
                        }
                    }
                }
            }
        }
        let mut seen: Vec<(Rational, Rational)> = Vec::new();
        for (dx, dy, exact) in dirs {
            let end = square_endpoint(&dx, &dy);
            if seen.contains(&end) {
                continue;
            }
            seen.push(end.clone());
            out.push(Trace { wall: name.clone(), end, exact });
        }
    }
    Ok(out)
}

/// CSV with header `wall,x,y`: `samples + 1` evenly spaced points per trace.
pub fn traces_to_csv(traces: &[Trace], samples: usize, precision: usize) -> String {
    let mut s = String::from("wall,x,y\n");
    let samples = samples.max(1);
    for t in traces {
        for k in 0..=samples {
            let f = Rational::new(k.into(), samples.into());
            s.push_str(&format!("{},{},{}\n", t.wall, to_decimal(&(&t.end.0 * &f), precision), to_decimal(&(&t.end.1 * &f), precision)));
        }
    }
    s
}
