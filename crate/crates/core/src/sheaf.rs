//! Numerical quiver sheaves and multi-Gieseker stability.
//!
//! A quiver sheaf is recorded by its Hilbert polynomial coefficients
//! `α_k^{L_j}(E_i)` for every vertex `i`, every bundle `L_j` and `0 ≤ k ≤ d`,
//! where `P^{L_j}_{E_i}(T) = Σ_k α_k^{L_j}(E_i) T^k / k!`.

use std::cmp::Ordering;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::RationalPolynomial;
use crate::rational::Rational;

fn factorial(k: usize) -> Rational {
    (1..=k).fold(Rational::one(), |acc, i| acc * Rational::from_integer(i.into()))
}

/// Checks that `m` is a `rows × cols` matrix of non-negative rationals.
fn check_weights(name: &str, m: &[Vec<Rational>], rows: usize, cols: usize) -> Result<()> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(Error::ShapeMismatch(format!("{name} must be a {rows}x{cols} matrix")));
    }
    Ok(())
}

/// The weights `σ, ρ ∈ (ℚ_{≥0})^{Q₀×N}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityPair {
    sigma: Vec<Vec<Rational>>,
    rho: Vec<Vec<Rational>>,
}

impl StabilityPair {
    pub fn new(sigma: Vec<Vec<Rational>>, rho: Vec<Vec<Rational>>) -> Result<Self> {
        let rows = sigma.len();
        let cols = sigma.first().map_or(0, |r| r.len());
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("σ must have at least one vertex and one bundle".into()));
        }
        check_weights("σ", &sigma, rows, cols)?;
        check_weights("ρ", &rho, rows, cols)?;
        for (name, m) in [("σ", &sigma), ("ρ", &rho)] {
            if m.iter().flatten().any(|x| x.is_negative()) {
                return Err(Error::InvalidParameter(format!("{name} has a negative entry")));
            }
            if let Some(i) = m.iter().position(|r| r.iter().all(|x| x.is_zero())) {
                return Err(Error::InvalidParameter(format!("{name} vanishes on every bundle at vertex {i}")));
            }
        }
        Ok(StabilityPair { sigma, rho })
    }

    /// `ρ = σ`, the case all decision procedures use.
    pub fn diagonal(sigma: Vec<Vec<Rational>>) -> Result<Self> {
        Self::new(sigma.clone(), sigma)
    }

    /// `σ_{ij} = σ̂_j` for every vertex, with `ρ = σ`.
    pub fn symmetric(sigma_hat: &[Rational], vertices: usize) -> Result<Self> {
        Self::diagonal(vec![sigma_hat.to_vec(); vertices])
    }

    pub fn sigma(&self) -> &[Vec<Rational>] {
        &self.sigma
    }
    pub fn rho(&self) -> &[Vec<Rational>] {
        &self.rho
    }
    pub fn is_positive(&self) -> bool {
        self.sigma.iter().chain(&self.rho).flatten().all(|x| x.is_positive())
    }
    pub fn is_symmetric(&self) -> bool {
        self.sigma.windows(2).all(|w| w[0] == w[1])
    }
}

/// Hilbert polynomial data of a quiver sheaf of dimension `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericalQuiverSheaf {
    dim: usize,
    /// `alpha[i][j][k] = α_k^{L_j}(E_i)`.
    alpha: Vec<Vec<Vec<Rational>>>,
    ranks: Option<Vec<Rational>>,
}

impl NumericalQuiverSheaf {
    pub fn new(dim: usize, alpha: Vec<Vec<Vec<Rational>>>, ranks: Option<Vec<Rational>>) -> Result<Self> {
        let bundles = alpha.first().map_or(0, |r| r.len());
        if alpha.is_empty() || bundles == 0 {
            return Err(Error::InvalidParameter("need at least one vertex and one bundle".into()));
        }
        for (i, row) in alpha.iter().enumerate() {
            if row.len() != bundles || row.iter().any(|c| c.len() != dim + 1) {
                return Err(Error::ShapeMismatch(format!(
                    "vertex {i}: expected {bundles} coefficient vectors of length {}",
                    dim + 1
                )));
            }
            let lead: Vec<&Rational> = row.iter().map(|c| &c[dim]).collect();
            if lead.iter().any(|x| x.is_negative()) {
                return Err(Error::InvalidParameter(format!("vertex {i}: negative leading coefficient")));
            }
            let zeros = lead.iter().filter(|x| x.is_zero()).count();
            if zeros != 0 && zeros != lead.len() {
                return Err(Error::InvalidParameter(format!(
                    "vertex {i}: leading coefficients must be all zero or all positive"
                )));
            }
            if zeros == lead.len() && row.iter().flatten().any(|x| !x.is_zero()) {
                return Err(Error::InvalidParameter(format!(
                    "vertex {i}: lower-dimensional data at a vertex of dimension below {dim}"
                )));
            }
        }
        if let Some(r) = &ranks {
            if r.len() != alpha.len() {
                return Err(Error::ShapeMismatch("one rank per vertex required".into()));
            }
            if r.iter().any(|x| x.is_negative()) {
                return Err(Error::InvalidParameter("negative rank".into()));
            }
        }
        Ok(NumericalQuiverSheaf { dim, alpha, ranks })
    }

    /// Dimension-zero data with `α_0 = d_i` for every bundle: the numerical
    /// shadow of a vector space representation on a point.
    pub fn from_dim_vector(dims: &[usize], bundles: usize) -> Self {
        let alpha = dims
            .iter()
            .map(|&d| vec![vec![Rational::from_integer(d.into())]; bundles])
            .collect();
        let ranks = Some(dims.iter().map(|&d| Rational::from_integer(d.into())).collect());
        NumericalQuiverSheaf { dim: 0, alpha, ranks }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn num_vertices(&self) -> usize {
        self.alpha.len()
    }
    pub fn num_bundles(&self) -> usize {
        self.alpha[0].len()
    }
    /// `α_k^{L_j}(E_i)`.
    pub fn alpha(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.alpha[i][j][k]
    }
    pub fn alphas(&self) -> &[Vec<Vec<Rational>>] {
        &self.alpha
    }
    pub fn ranks(&self) -> Option<&[Rational]> {
        self.ranks.as_deref()
    }
    pub fn is_zero_at(&self, i: usize) -> bool {
        self.alpha[i].iter().all(|c| c[self.dim].is_zero())
    }
    pub fn is_zero(&self) -> bool {
        (0..self.num_vertices()).all(|i| self.is_zero_at(i))
    }

    /// Total rank `Σ_i rk(E_i)` in torsion-free mode.
    pub fn total_rank(&self) -> Result<Rational> {
        Ok(self.ranks.as_ref().ok_or(Error::MissingRanks)?.iter().sum())
    }

    fn check_shape(&self, name: &str, m: &[Vec<Rational>]) -> Result<()> {
        check_weights(name, m, self.num_vertices(), self.num_bundles())
    }

    /// `α_k^σ(E) = Σ_{i,j} σ_{ij} α_k^{L_j}(E_i)`.
    pub fn alpha_sigma(&self, sigma: &[Vec<Rational>], k: usize) -> Result<Rational> {
        self.check_shape("σ", sigma)?;
        let mut s = Rational::zero();
        for (row, w) in self.alpha.iter().zip(sigma) {
            for (c, x) in row.iter().zip(w) {
                s += x * &c[k];
            }
        }
        Ok(s)
    }

    /// Numerical direct sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.num_vertices() != other.num_vertices() || self.num_bundles() != other.num_bundles() {
            return Err(Error::ShapeMismatch("direct sum of sheaves of different shapes".into()));
        }
        let alpha = self
            .alpha
            .iter()
            .zip(&other.alpha)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect()).collect())
            .collect();
        let ranks = match (&self.ranks, &other.ranks) {
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            _ => None,
        };
        Ok(NumericalQuiverSheaf { dim: self.dim, alpha, ranks })
    }
}

/// `P^σ_E(T) = Σ_k α_k^σ(E) T^k / k!`.
pub fn multi_hilbert(e: &NumericalQuiverSheaf, sigma: &[Vec<Rational>]) -> Result<RationalPolynomial> {
    let coeffs = (0..=e.dim)
        .map(|k| Ok(e.alpha_sigma(sigma, k)? / factorial(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RationalPolynomial::new(coeffs))
}

/// `rk^ρ(E) = Σ_{i,j} ρ_{ij} α_d^{L_j}(E_i)`.
pub fn multi_rank(e: &NumericalQuiverSheaf, rho: &[Vec<Rational>]) -> Result<Rational> {
    e.alpha_sigma(rho, e.dim)
}

/// `P^σ_E / rk^ρ(E)` for arbitrary weight matrices (signs unchecked).
pub fn reduced_poly_weights(e: &NumericalQuiverSheaf, sigma: &[Vec<Rational>], rho: &[Vec<Rational>]) -> Result<RationalPolynomial> {
    let r = multi_rank(e, rho)?;
    if r.is_zero() {
        return Err(Error::ZeroRank);
    }
    Ok(multi_hilbert(e, sigma)?.scale(&r.recip()))
}

/// The reduced multi-Hilbert polynomial `p^{(σ,ρ)}_E`.
pub fn reduced_poly(e: &NumericalQuiverSheaf, sp: &StabilityPair) -> Result<RationalPolynomial> {
    reduced_poly_weights(e, sp.sigma(), sp.rho())
}

/// `μ̂^σ(E) = α^σ_{d−1}(E) / α^σ_d(E)`.
pub fn slope_sigma(e: &NumericalQuiverSheaf, sigma: &[Vec<Rational>]) -> Result<Rational> {
    if e.dim == 0 {
        return Err(Error::InvalidParameter("slope needs dimension at least 1".into()));
    }
    let top = e.alpha_sigma(sigma, e.dim)?;
    if top.is_zero() {
        return Err(Error::ZeroLeadingCoefficient);
    }
    Ok(e.alpha_sigma(sigma, e.dim - 1)? / top)
}

/// `δ_{i₀}(E)`: the data of `E` at `i₀`, zero at every other vertex.
pub fn delta_vertex(e: &NumericalQuiverSheaf, i0: usize) -> Result<NumericalQuiverSheaf> {
    if i0 >= e.num_vertices() {
        return Err(Error::UnknownVertex(format!("#{i0}")));
    }
    let alpha = e
        .alpha
        .iter()
        .enumerate()
        .map(|(i, row)| {
            if i == i0 {
                row.clone()
            } else {
                vec![vec![Rational::zero(); e.dim + 1]; row.len()]
            }
        })
        .collect();
    let ranks = e
        .ranks
        .as_ref()
        .map(|r| r.iter().enumerate().map(|(i, x)| if i == i0 { x.clone() } else { Rational::zero() }).collect());
    Ok(NumericalQuiverSheaf { dim: e.dim, alpha, ranks })
}

/// `p^{σ_{i}}_{E_i}`: the reduced polynomial of the single sheaf `E_i` with
/// respect to the row `σ_i` (and `ρ = σ`).
pub fn vertex_reduced_poly(e: &NumericalQuiverSheaf, i: usize, sigma_row: &[Rational]) -> Result<RationalPolynomial> {
    let d = delta_vertex(e, i)?;
    let mut sigma = vec![vec![Rational::zero(); e.num_bundles()]; e.num_vertices()];
    if sigma_row.len() != e.num_bundles() {
        return Err(Error::ShapeMismatch("σ row length differs from the bundle count".into()));
    }
    sigma[i] = sigma_row.to_vec();
    reduced_poly_weights(&d, &sigma, &sigma)
}

/// A pair `(i, j)` with `σ_{ij} ≠ 0` and `μ̂^{L_j}(E_i) ≥ μ`, which exists
/// whenever `μ̂^σ(E) ≥ μ`. The first such pair in vertex-then-bundle order is
/// returned.
pub fn destabilizer_vertex_witness(e: &NumericalQuiverSheaf, sigma: &[Vec<Rational>], mu: &Rational) -> Result<(usize, usize)> {
    let slope = slope_sigma(e, sigma)?;
    if slope < *mu {
        return Err(Error::Precondition(format!("slope {slope} is below {mu}")));
    }
    let d = e.dim;
    for (i, row) in e.alpha.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if sigma[i][j].is_zero() || c[d].is_zero() {
                continue;
            }
            if &c[d - 1] / &c[d] >= *mu {
                return Ok((i, j));
            }
        }
    }
    Err(Error::Precondition("no vertex attains the slope; weights are inconsistent".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SheafVerdictKind {
    Stable,
    Semistable,
    Unstable,
}

/// Outcome of comparing `E` against a supplied list of subobjects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubobjectVerdict {
    pub kind: SheafVerdictKind,
    pub reduced: RationalPolynomial,
    /// Index of the subobject with the largest reduced polynomial among those
    /// violating the strict (or weak) inequality, first on ties.
    pub witness: Option<usize>,
}

/// Decides (semi)stability of `E` relative to the given nonzero subobjects,
/// using arbitrary weight matrices `σ, ρ`. Subobjects numerically equal to
/// `E` count as `E` itself; zero subobjects are ignored.
pub fn check_subobjects(
    e: &NumericalQuiverSheaf,
    subs: &[NumericalQuiverSheaf],
    sigma: &[Vec<Rational>],
    rho: &[Vec<Rational>],
) -> Result<SubobjectVerdict> {
    let pe = reduced_poly_weights(e, sigma, rho)?;
    let mut worst: Option<(usize, RationalPolynomial)> = None;
    for (k, f) in subs.iter().enumerate() {
        if f.is_zero() || f == e {
            continue;
        }
        let pf = reduced_poly_weights(f, sigma, rho)?;
        if worst.as_ref().is_none_or(|(_, w)| pf.lex_compare(w) == Ordering::Greater) {
            worst = Some((k, pf));
        }
    }
    let (kind, witness) = match &worst {
        None => (SheafVerdictKind::Stable, None),
        Some((k, pf)) => match pf.lex_compare(&pe) {
            Ordering::Greater => (SheafVerdictKind::Unstable, Some(*k)),
            Ordering::Equal => (SheafVerdictKind::Semistable, Some(*k)),
            Ordering::Less => (SheafVerdictKind::Stable, None),
        },
    };
    Ok(SubobjectVerdict { kind, reduced: pe, witness })
}
