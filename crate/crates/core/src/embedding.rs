//! The representation `Hom(T, E)` of the twisted quiver attached to a split
//! quiver sheaf on the projective line, computed directly on section spaces.
//!
//! `V_{ij} = H⁰(E_i(n b_j))` and `W_{ij} = H⁰(E_i(m b_j))`, each the direct sum
//! over the summands `O(a_s)` of `E_i` of monomial bases `x^e, x^{e−1}y, …, y^e`.
//! The arrow `φ_{ikl}` is multiplication with sections of `O(m b_l − n b_k)`,
//! stored as one matrix per label monomial.

use std::fmt;
use std::sync::Arc;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Subspace, QQ};
use crate::p1::{is_n_regular_p1, P1SheafModel};
use crate::poly::BinaryForm;
use crate::quiver::{build_twisted, TwistedQuiver, VertexTag};
use crate::rational::Rational;
use crate::rep::{Representation, SubRep};

/// Monomials of `H⁰(O(e))` as exponent pairs `(i, j)` for `x^i y^j`.
pub fn section_basis(e: i64) -> Vec<(u64, u64)> {
    if e < 0 {
        return Vec::new();
    }
    let e = e as u64;
    (0..=e).map(|t| (e - t, t)).collect()
}

/// Rendered monomial list, e.g. `["x^2", "xy", "y^2"]`.
pub fn section_basis_names(e: i64) -> Vec<String> {
    let var = |v: &str, k: u64| match k {
        0 => String::new(),
        1 => v.to_string(),
        _ => format!("{v}^{k}"),
    };
    section_basis(e)
        .into_iter()
        .map(|(i, j)| {
            let s = format!("{}{}", var("x", i), var("y", j));
            if s.is_empty() {
                "1".to_string()
            } else {
                s
            }
        })
        .collect()
}

fn h0(e: i64) -> usize {
    if e < 0 {
        0
    } else {
        e as usize + 1
    }
}

/// Matrix of multiplication by a form of degree `f.degree()` from `H⁰(O(c))`
/// to `H⁰(O(c + deg f))`.
pub fn multiplication_matrix(f: &BinaryForm, c: i64) -> Matrix<QQ> {
    let rows = h0(c + f.degree());
    let cols = h0(c);
    let mut m = Matrix::zeros(&QQ, rows, cols);
    for u in 0..cols {
        for (t, ft) in f.coeffs().iter().enumerate() {
            if !ft.is_zero() {
                m.set(t + u, u, ft.clone());
            }
        }
    }
    m
}

/// `d(τ, m, n)`, indexed `[vertex][row]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimVector {
    pub v: Vec<Vec<usize>>,
    pub w: Vec<Vec<usize>>,
}

/// `θ(σ, d)`, indexed `[vertex][row]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaTwisted {
    pub v: Vec<Vec<Rational>>,
    pub w: Vec<Vec<Rational>>,
}

impl ThetaTwisted {
    /// `θ(d′) = Σ θ_{ij1} d′_{v_{ij}} + θ_{ij2} d′_{w_{ij}}`.
    pub fn evaluate(&self, d: &DimVector) -> Rational {
        let mut s = Rational::zero();
        for (tv, dv) in self.v.iter().flatten().zip(d.v.iter().flatten()) {
            s += tv * Rational::from_integer((*dv).into());
        }
        for (tw, dw) in self.w.iter().flatten().zip(d.w.iter().flatten()) {
            s += tw * Rational::from_integer((*dw).into());
        }
        s
    }

    /// The values on the vertices of the twisted quiver, in its vertex order.
    pub fn flatten(&self, tq: &TwistedQuiver) -> Vec<Rational> {
        tq.vertex_tags
            .iter()
            .map(|t| match *t {
                VertexTag::V { vertex, row } => self.v[vertex][row].clone(),
                VertexTag::W { vertex, row } => self.w[vertex][row].clone(),
            })
            .collect()
    }
}

fn check_regular(model: &P1SheafModel, n: i64, m: i64) -> Result<()> {
    for k in [n, m] {
        if !is_n_regular_p1(model, k) {
            return Err(Error::NotRegular(format!("model is not ({k}, L)-regular")));
        }
    }
    Ok(())
}

/// `d_{v_{ik}} = Σ_s h⁰(O(a_s + n b_k))`, `d_{w_{ik}} = Σ_s h⁰(O(a_s + m b_k))`.
pub fn dim_vector(model: &P1SheafModel, n: i64, m: i64) -> Result<DimVector> {
    check_regular(model, n, m)?;
    let dims = |t: i64| {
        model
            .twists()
            .iter()
            .map(|tw| model.bundle_degrees().iter().map(|&b| tw.iter().map(|&a| h0(a + t * b)).sum()).collect())
            .collect()
    };
    Ok(DimVector { v: dims(n), w: dims(m) })
}

/// `θ_{ij1} = σ_{ij} / Σ σ_{kl} d_{v_{kl}}`, `θ_{ij2} = −σ_{ij} / Σ σ_{kl} d_{w_{kl}}`.
pub fn theta_from_sigma(sigma: &[Vec<Rational>], d: &DimVector) -> Result<ThetaTwisted> {
    if sigma.len() != d.v.len() || sigma.iter().zip(&d.v).any(|(s, v)| s.len() != v.len()) {
        return Err(Error::ShapeMismatch("σ and the dimension vector differ in shape".into()));
    }
    let weigh = |ds: &[Vec<usize>]| -> Rational {
        sigma
            .iter()
            .flatten()
            .zip(ds.iter().flatten())
            .map(|(s, &x)| s * Rational::from_integer(x.into()))
            .sum()
    };
    let (sv, sw) = (weigh(&d.v), weigh(&d.w));
    if !sv.is_positive() || !sw.is_positive() {
        return Err(Error::ZeroDenominator("Σ σ d vanishes on V or on W".into()));
    }
    Ok(ThetaTwisted {
        v: sigma.iter().map(|r| r.iter().map(|s| s / &sv).collect()).collect(),
        w: sigma.iter().map(|r| r.iter().map(|s| -(s / &sw)).collect()).collect(),
    })
}

/// `μ′ ∈ [0, ∞]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuxSlope {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for AuxSlope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuxSlope::Finite(q) => f.write_str(&crate::rational::format_rational(q)),
            AuxSlope::Infinite => f.write_str("inf"),
        }
    }
}

impl PartialOrd for AuxSlope {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        Some(match (self, other) {
            (AuxSlope::Finite(a), AuxSlope::Finite(b)) => a.cmp(b),
            (AuxSlope::Finite(_), AuxSlope::Infinite) => Less,
            (AuxSlope::Infinite, AuxSlope::Finite(_)) => Greater,
            (AuxSlope::Infinite, AuxSlope::Infinite) => Equal,
        })
    }
}

/// An embedded representation together with the data it came from.
#[derive(Debug, Clone)]
pub struct TwistedRep {
    pub twisted: Arc<TwistedQuiver>,
    pub rep: Representation<QQ>,
    pub n: i64,
    pub m: i64,
    pub bundle_degrees: Vec<i64>,
    /// Summand twists per vertex of the source quiver.
    pub twists: Vec<Vec<i64>>,
}

/// Builds `Hom(T, E)` for a split model.
pub fn embed_p1(model: &P1SheafModel, n: i64, m: i64) -> Result<TwistedRep> {
    check_regular(model, n, m)?;
    let b = model.bundle_degrees();
    let rows = b.len();
    let mut label_dims = vec![vec![0usize; rows]; rows];
    for k in 0..rows {
        for l in 0..rows {
            let e = m * b[l] - n * b[k];
            if e < 0 {
                return Err(Error::Precondition(format!(
                    "label O({e}) for rows {},{} has no sections; need m·b_l ≥ n·b_k",
                    k + 1,
                    l + 1
                )));
            }
            label_dims[k][l] = h0(e);
        }
    }
    let tq = Arc::new(build_twisted(model.quiver(), rows, &label_dims)?);
    let src = model.quiver();
    let twists = model.twists();

    let dims: Vec<usize> = tq
        .vertex_tags
        .iter()
        .map(|t| match *t {
            VertexTag::V { vertex, row } => twists[vertex].iter().map(|&a| h0(a + n * b[row])).sum(),
            VertexTag::W { vertex, row } => twists[vertex].iter().map(|&a| h0(a + m * b[row])).sum(),
        })
        .collect();

    let mut maps: Vec<Vec<Matrix<QQ>>> = vec![Vec::new(); tq.quiver.num_arrows()];
    for i in 0..src.num_vertices() {
        for k in 0..rows {
            for l in 0..rows {
                let e = m * b[l] - n * b[k];
                let ms = (0..h0(e))
                    .map(|h| {
                        let mono = BinaryForm::monomial(e, h);
                        block_diagonal(twists[i].iter().map(|&a| multiplication_matrix(&mono, a + n * b[k])).collect())
                    })
                    .collect();
                maps[tq.phi_index(i, k, l)] = ms;
            }
        }
    }
    for (ai, a) in src.arrows().iter().enumerate() {
        let forms = model.arrow_matrix(ai);
        for k in 0..rows {
            for (t, left) in [(n, true), (m, false)] {
                let blocks: Vec<Vec<Matrix<QQ>>> = twists[a.dst]
                    .iter()
                    .enumerate()
                    .map(|(ti, &at)| {
                        twists[a.src]
                            .iter()
                            .enumerate()
                            .map(|(si, &as_)| {
                                let c = as_ + t * b[k];
                                let f = &forms[ti][si];
                                if f.degree() < 0 {
                                    Matrix::zeros(&QQ, h0(at + t * b[k]), h0(c))
                                } else {
                                    multiplication_matrix(f, c)
                                }
                            })
                            .collect()
                    })
                    .collect();
                let rows_d = twists[a.dst].iter().map(|&at| h0(at + t * b[k])).collect::<Vec<_>>();
                let cols_d = twists[a.src].iter().map(|&as_| h0(as_ + t * b[k])).collect::<Vec<_>>();
                let idx = if left { tq.left_index(ai, k) } else { tq.right_index(ai, k) };
                maps[idx] = vec![assemble_blocks(&blocks, &rows_d, &cols_d)];
            }
        }
    }
    let rep = Representation::new(QQ, Arc::new(tq.quiver.clone()), dims, maps)?;
    Ok(TwistedRep { twisted: tq, rep, n, m, bundle_degrees: b.to_vec(), twists: twists.to_vec() })
}

fn block_diagonal(blocks: Vec<Matrix<QQ>>) -> Matrix<QQ> {
    blocks.into_iter().fold(Matrix::zeros(&QQ, 0, 0), |acc, b| acc.block_diag(&b))
}

fn assemble_blocks(blocks: &[Vec<Matrix<QQ>>], rows: &[usize], cols: &[usize]) -> Matrix<QQ> {
    let mut out = Matrix::zeros(&QQ, rows.iter().sum(), cols.iter().sum());
    let mut r0 = 0;
    for (bi, brow) in blocks.iter().enumerate() {
        let mut c0 = 0;
        for (bj, blk) in brow.iter().enumerate() {
            for r in 0..blk.rows() {
                for c in 0..blk.cols() {
                    out.set(r0 + r, c0 + c, blk.get(r, c).clone());
                }
            }
            c0 += cols[bj];
        }
        r0 += rows[bi];
    }
    out
}

impl TwistedRep {
    pub fn dim_vector(&self) -> DimVector {
        self.dim_vector_of(self.rep.dims())
    }

    /// Regroups per-vertex dimensions of the twisted quiver as `(V, W)` tables.
    pub fn dim_vector_of(&self, dims: &[usize]) -> DimVector {
        let nv = self.twisted.source.num_vertices();
        let rows = self.twisted.rows;
        let mut d = DimVector { v: vec![vec![0; rows]; nv], w: vec![vec![0; rows]; nv] };
        for (t, &x) in self.twisted.vertex_tags.iter().zip(dims) {
            match *t {
                VertexTag::V { vertex, row } => d.v[vertex][row] = x,
                VertexTag::W { vertex, row } => d.w[vertex][row] = x,
            }
        }
        d
    }

    /// `μ′ = Σ σ_{ij} dim V_{ij} / Σ σ_{ij} dim W_{ij}` for the given dimensions.
    pub fn aux_slope_of(&self, dims: &[usize], sigma: &[Vec<Rational>]) -> Result<AuxSlope> {
        let d = self.dim_vector_of(dims);
        if sigma.len() != d.v.len() || sigma.iter().zip(&d.v).any(|(s, v)| s.len() != v.len()) {
            return Err(Error::ShapeMismatch("σ and the twisted representation differ in shape".into()));
        }
        let weigh = |ds: &[Vec<usize>]| -> Rational {
            sigma
                .iter()
                .flatten()
                .zip(ds.iter().flatten())
                .map(|(s, &x)| s * Rational::from_integer(x.into()))
                .sum()
        };
        let (num, den) = (weigh(&d.v), weigh(&d.w));
        match (num.is_zero(), den.is_zero()) {
            (true, true) => Err(Error::UndefinedSlope),
            (false, true) => Ok(AuxSlope::Infinite),
            _ => Ok(AuxSlope::Finite(num / den)),
        }
    }

    pub fn aux_slope(&self, sigma: &[Vec<Rational>]) -> Result<AuxSlope> {
        self.aux_slope_of(self.rep.dims(), sigma)
    }

    fn is_v(&self, vertex: usize) -> bool {
        matches!(self.twisted.vertex_tags[vertex], VertexTag::V { .. })
    }

    fn sigma_at(&self, vertex: usize, sigma: &[Vec<Rational>]) -> Rational {
        match self.twisted.vertex_tags[vertex] {
            VertexTag::V { vertex, row } | VertexTag::W { vertex, row } => sigma[vertex][row].clone(),
        }
    }

    /// `V′ = 0` everywhere and `W′_{ij} = 0` wherever `σ_{ij} = 0`.
    pub fn is_degenerate(&self, sub: &SubRep<QQ>, sigma: &[Vec<Rational>]) -> bool {
        sub.spaces().iter().enumerate().all(|(x, s)| {
            s.is_zero() || (!self.is_v(x) && !self.sigma_at(x, sigma).is_zero())
        })
    }

    /// `M′ ⪯ M″`: `V′ ⊆ V″` and `W″ ⊆ W′`.
    pub fn is_subordinate(&self, m1: &SubRep<QQ>, m2: &SubRep<QQ>) -> Result<bool> {
        let (a, b) = (m1.spaces(), m2.spaces());
        if a.len() != self.rep.dims().len() || b.len() != a.len() || a.iter().zip(b).any(|(x, y)| x.ambient() != y.ambient()) {
            return Err(Error::ShapeMismatch("subrepresentations live in different ambients".into()));
        }
        Ok(a.iter().zip(b).enumerate().all(|(x, (s1, s2))| {
            if self.is_v(x) {
                s1.is_subspace_of(s2)
            } else {
                s2.is_subspace_of(s1)
            }
        }))
    }

    /// The tight subrepresentation `M″ ⪰ M′`:
    /// `W″_{ij} = Σ_k φ_{ikj}(V′_{ik} ⊗ H_{kj})` and
    /// `V″_{ij} = {v : φ_{ijk}(v ⊗ h) ∈ W″_{ik} for all k, h}`.
    pub fn tighten(&self, sub: &SubRep<QQ>) -> Result<SubRep<QQ>> {
        let tq = &self.twisted;
        if let Some(index) = self.rep.check_relations(&tq.i1)? {
            return Err(Error::RelationViolated { index });
        }
        if !self.rep.is_subrep(sub.spaces()) {
            return Err(Error::Precondition("input is not a subrepresentation".into()));
        }
        let nv = tq.source.num_vertices();
        let rows = tq.rows;
        let mut spaces: Vec<Subspace<QQ>> = sub.spaces().to_vec();
        for i in 0..nv {
            for j in 0..rows {
                let w = tq.w_index(i, j);
                let mut acc = Subspace::zero(&QQ, self.rep.dims()[w]);
                for k in 0..rows {
                    let src = &sub.spaces()[tq.v_index(i, k)];
                    for mat in self.rep.map(tq.phi_index(i, k, j)) {
                        acc = acc.sum(&src.image_under(mat));
                    }
                }
                spaces[w] = acc;
            }
        }
        for i in 0..nv {
            for j in 0..rows {
                let v = tq.v_index(i, j);
                let mut acc = Subspace::full(&QQ, self.rep.dims()[v]);
                for k in 0..rows {
                    let target = &spaces[tq.w_index(i, k)];
                    for mat in self.rep.map(tq.phi_index(i, j, k)) {
                        acc = acc.intersection(&target.preimage_under(mat));
                    }
                }
                spaces[v] = acc;
            }
        }
        self.rep.subrep(spaces)
    }

    /// Equality of two subrepresentations on every coordinate with `σ_{ij} ≠ 0`.
    pub fn agree_on_support(&self, a: &SubRep<QQ>, b: &SubRep<QQ>, sigma: &[Vec<Rational>]) -> bool {
        (0..a.spaces().len())
            .filter(|&x| !self.sigma_at(x, sigma).is_zero())
            .all(|x| a.spaces()[x] == b.spaces()[x])
    }

    /// `Hom(T, F)` for a coordinate subsheaf `F` given by summand selections.
    pub fn subsheaf_subrep(&self, selection: &[Vec<usize>]) -> Result<SubRep<QQ>> {
        if selection.len() != self.twists.len() {
            return Err(Error::ShapeMismatch("one summand selection per vertex required".into()));
        }
        let spaces = self
            .twisted
            .vertex_tags
            .iter()
            .map(|t| {
                let (vertex, row, power) = match *t {
                    VertexTag::V { vertex, row } => (vertex, row, self.n),
                    VertexTag::W { vertex, row } => (vertex, row, self.m),
                };
                let sizes: Vec<usize> = self.twists[vertex].iter().map(|&a| h0(a + power * self.bundle_degrees[row])).collect();
                let total: usize = sizes.iter().sum();
                let mut vectors = Vec::new();
                let mut offset = 0;
                for (s, &size) in sizes.iter().enumerate() {
                    if selection[vertex].contains(&s) {
                        for c in 0..size {
                            let mut e = vec![Rational::zero(); total];
                            e[offset + c] = Rational::from_integer(1.into());
                            vectors.push(e);
                        }
                    }
                    offset += size;
                }
                Subspace::span(&QQ, total, &vectors)
            })
            .collect();
        self.rep.subrep(spaces)
    }

    /// θ evaluated on the twisted quiver's vertex order.
    pub fn theta(&self, sigma: &[Vec<Rational>]) -> Result<ThetaTwisted> {
        theta_from_sigma(sigma, &self.dim_vector())
    }
}
