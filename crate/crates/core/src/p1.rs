//! Split quiver sheaves on the projective line.
//!
//! The bundles `L_j = O(b_j)` have positive degrees, each vertex carries
//! `E_i = O(a_1) ⊕ … ⊕ O(a_r)`, and an arrow `E_i → E_k` is a matrix of binary
//! forms whose entry `(t, s)` has degree `a^k_t − a^i_s`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{BinaryForm, RationalPolynomial};
use crate::quiver::{LabeledQuiver, Path};
use crate::rational::{Rational, RationalValue};
use crate::sheaf::{self, NumericalQuiverSheaf, StabilityPair};

type FormMatrix = Vec<Vec<BinaryForm>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P1SheafModel {
    quiver: Arc<LabeledQuiver>,
    bundle_degrees: Vec<i64>,
    twists: Vec<Vec<i64>>,
    /// Per arrow, rows indexed by target summands, columns by source summands.
    arrows: Vec<FormMatrix>,
}

impl P1SheafModel {
    pub fn new(quiver: Arc<LabeledQuiver>, bundle_degrees: Vec<i64>, twists: Vec<Vec<i64>>, arrows: Vec<FormMatrix>) -> Result<Self> {
        if !quiver.is_unlabeled() {
            return Err(Error::InvalidParameter("sheaf models need an unlabeled quiver".into()));
        }
        if bundle_degrees.is_empty() || bundle_degrees.iter().any(|&b| b <= 0) {
            return Err(Error::InvalidParameter("bundle degrees must be positive and at least one is needed".into()));
        }
        if twists.len() != quiver.num_vertices() {
            return Err(Error::ShapeMismatch("one twist list per vertex required".into()));
        }
        if arrows.len() != quiver.num_arrows() {
            return Err(Error::ShapeMismatch("one matrix per arrow required".into()));
        }
        for (a, m) in quiver.arrows().iter().zip(&arrows) {
            let (src, dst) = (&twists[a.src], &twists[a.dst]);
            if m.len() != dst.len() || m.iter().any(|r| r.len() != src.len()) {
                return Err(Error::ShapeMismatch(format!(
                    "arrow {} needs a {}x{} matrix",
                    a.id,
                    dst.len(),
                    src.len()
                )));
            }
            for (t, row) in m.iter().enumerate() {
                for (s, form) in row.iter().enumerate() {
                    if form.degree() != dst[t] - src[s] {
                        return Err(Error::DegreeMismatch(format!(
                            "arrow {} entry ({t},{s}) has degree {}, expected {}",
                            a.id,
                            form.degree(),
                            dst[t] - src[s]
                        )));
                    }
                }
            }
        }
        let model = P1SheafModel { quiver, bundle_degrees, twists, arrows };
        if let Some(index) = model.check_relations()? {
            return Err(Error::RelationViolated { index });
        }
        Ok(model)
    }

    /// The model with all arrows zero.
    pub fn with_zero_arrows(quiver: Arc<LabeledQuiver>, bundle_degrees: Vec<i64>, twists: Vec<Vec<i64>>) -> Result<Self> {
        let arrows = quiver
            .arrows()
            .iter()
            .map(|a| zero_matrix(&twists[a.src], &twists[a.dst]))
            .collect();
        Self::new(quiver, bundle_degrees, twists, arrows)
    }

    pub fn quiver(&self) -> &Arc<LabeledQuiver> {
        &self.quiver
    }
    pub fn bundle_degrees(&self) -> &[i64] {
        &self.bundle_degrees
    }
    pub fn twists(&self) -> &[Vec<i64>] {
        &self.twists
    }
    pub fn arrow_matrix(&self, a: usize) -> &FormMatrix {
        &self.arrows[a]
    }
    pub fn rank(&self, i: usize) -> usize {
        self.twists[i].len()
    }

    fn path_matrix(&self, p: &Path) -> FormMatrix {
        let tw = &self.twists[p.source()];
        let mut m: FormMatrix = (0..tw.len())
            .map(|t| {
                (0..tw.len())
                    .map(|s| if s == t { BinaryForm::monomial(0, 0) } else { BinaryForm::zero(tw[t] - tw[s]) })
                    .collect()
            })
            .collect();
        for &a in p.arrows() {
            m = form_mul(&self.arrows[a], &m, &self.twists[self.quiver.arrows()[a].dst], tw);
        }
        m
    }

    /// Index of the first relation of the quiver that the arrow matrices violate.
    pub fn check_relations(&self) -> Result<Option<usize>> {
        for (index, r) in self.quiver.relations().iter().enumerate() {
            let (src, dst) = (&self.twists[r.source()], &self.twists[r.target()]);
            let mut sum = zero_matrix(src, dst);
            for (c, p) in r.terms() {
                let m = self.path_matrix(p);
                for (row, mrow) in sum.iter_mut().zip(&m) {
                    for (x, y) in row.iter_mut().zip(mrow) {
                        *x = x.add(&y.scale(c));
                    }
                }
            }
            if sum.iter().flatten().any(|f| !f.is_zero()) {
                return Ok(Some(index));
            }
        }
        Ok(None)
    }

    /// Vertex-wise direct sum with block-diagonal arrows.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.quiver != other.quiver || self.bundle_degrees != other.bundle_degrees {
            return Err(Error::ShapeMismatch("direct sum of models over different data".into()));
        }
        let twists: Vec<Vec<i64>> = self.twists.iter().zip(&other.twists).map(|(a, b)| [a.clone(), b.clone()].concat()).collect();
        let arrows = self
            .quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(ai, a)| {
                let mut m = zero_matrix(&twists[a.src], &twists[a.dst]);
                let (r0, c0) = (self.twists[a.dst].len(), self.twists[a.src].len());
                for (t, row) in self.arrows[ai].iter().enumerate() {
                    for (s, f) in row.iter().enumerate() {
                        m[t][s] = f.clone();
                    }
                }
                for (t, row) in other.arrows[ai].iter().enumerate() {
                    for (s, f) in row.iter().enumerate() {
                        m[r0 + t][c0 + s] = f.clone();
                    }
                }
                m
            })
            .collect();
        Self::new(self.quiver.clone(), self.bundle_degrees.clone(), twists, arrows)
    }

    /// Coordinate subsheaf: keeps the selected summands at every vertex.
    /// Fails unless every arrow maps selected summands into selected summands.
    pub fn coordinate_subsheaf(&self, selection: &[Vec<usize>]) -> Result<Self> {
        if !self.is_coordinate_subsheaf(selection) {
            return Err(Error::Precondition("summand selection is not arrow-invariant".into()));
        }
        let twists: Vec<Vec<i64>> = selection
            .iter()
            .zip(&self.twists)
            .map(|(sel, tw)| sel.iter().map(|&s| tw[s]).collect())
            .collect();
        let arrows = self
            .quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(ai, a)| {
                selection[a.dst]
                    .iter()
                    .map(|&t| selection[a.src].iter().map(|&s| self.arrows[ai][t][s].clone()).collect())
                    .collect()
            })
            .collect();
        Self::new(self.quiver.clone(), self.bundle_degrees.clone(), twists, arrows)
    }

    pub fn is_coordinate_subsheaf(&self, selection: &[Vec<usize>]) -> bool {
        if selection.len() != self.twists.len() {
            return false;
        }
        for (sel, tw) in selection.iter().zip(&self.twists) {
            if sel.windows(2).any(|w| w[0] >= w[1]) || sel.iter().any(|&s| s >= tw.len()) {
                return false;
            }
        }
        self.quiver.arrows().iter().enumerate().all(|(ai, a)| {
            selection[a.src].iter().all(|&s| {
                (0..self.twists[a.dst].len())
                    .filter(|t| !selection[a.dst].contains(t))
                    .all(|t| self.arrows[ai][t][s].is_zero())
            })
        })
    }

    /// All arrow-invariant summand selections, in binary counting order over
    /// the summands (vertex-major). Refuses more than 20 summands in total.
    pub fn coordinate_subsheaves(&self) -> Result<Vec<Vec<Vec<usize>>>> {
        let total: usize = self.twists.iter().map(|t| t.len()).sum();
        if total > 20 {
            return Err(Error::InstanceTooLarge { count: 1u128 << total, cap: 1 << 20 });
        }
        let mut out = Vec::new();
        for mask in 0u32..(1 << total) {
            let mut bit = 0;
            let sel: Vec<Vec<usize>> = self
                .twists
                .iter()
                .map(|tw| {
                    let v = (0..tw.len()).filter(|s| mask & (1 << (bit + s)) != 0).collect();
                    bit += tw.len();
                    v
                })
                .collect();
            if self.is_coordinate_subsheaf(&sel) {
                out.push(sel);
            }
        }
        Ok(out)
    }
}

fn zero_matrix(src: &[i64], dst: &[i64]) -> FormMatrix {
    dst.iter().map(|&t| src.iter().map(|&s| BinaryForm::zero(t - s)).collect()).collect()
}

/// `p · q` for `q : O(src) → O(mid)` and `p : O(mid) → O(dst)`.
fn form_mul(p: &FormMatrix, q: &FormMatrix, dst: &[i64], src: &[i64]) -> FormMatrix {
    let mut out = zero_matrix(src, dst);
    for (t, row) in out.iter_mut().enumerate() {
        for (s, x) in row.iter_mut().enumerate() {
            for (u, pu) in p[t].iter().enumerate() {
                let prod = pu.mul(&q[u][s]);
                if !prod.is_zero() {
                    *x = x.add(&prod);
                }
            }
        }
    }
    out
}

/// Numerical data via `χ(O(a) ⊗ O(b)^T) = a + bT + 1`: `d = 1`,
/// `α₁^{L_j}(E_i) = r_i b_j`, `α₀^{L_j}(E_i) = Σ_s (a_s + 1)`, ranks `r_i`.
pub fn p1_sheaf_to_numeric(model: &P1SheafModel) -> NumericalQuiverSheaf {
    let alpha = model
        .twists
        .iter()
        .map(|tw| {
            let chi: i64 = tw.iter().map(|a| a + 1).sum();
            let r = tw.len() as i64;
            model
                .bundle_degrees
                .iter()
                .map(|&b| vec![Rational::from_integer(chi.into()), Rational::from_integer((r * b).into())])
                .collect()
        })
        .collect();
    let ranks = model.twists.iter().map(|t| Rational::from_integer(t.len().into())).collect();
    NumericalQuiverSheaf::new(1, alpha, Some(ranks)).expect("split models give valid numerical data")
}

/// `(n, L)`-regularity: `h¹(O(a + (n−1) b_j)) = 0`, i.e. `a + (n−1) b_j ≥ −1`.
pub fn is_n_regular_p1(model: &P1SheafModel, n: i64) -> bool {
    model
        .twists
        .iter()
        .flatten()
        .all(|&a| model.bundle_degrees.iter().all(|&b| a + (n - 1) * b >= -1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SymmetricWitness {
    /// `E_vertex` is itself unstable: its summand `O(twist)` has larger
    /// reduced polynomial than `E`.
    PerVertex { vertex: usize, twist: i64 },
    /// `δ_vertex(E)` has larger reduced polynomial than `E`.
    Delta { vertex: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricVerdict {
    pub semistable: bool,
    /// `p^σ_E` for the symmetric `σ` with `ρ = σ`.
    pub reduced: RationalPolynomial,
    /// `p^{σ̂}_{E_i}` for each nonzero vertex.
    pub vertex_polys: Vec<Option<RationalPolynomial>>,
    pub witness: Option<SymmetricWitness>,
    /// Reduced polynomial of the witness subobject.
    pub witness_poly: Option<RationalPolynomial>,
}

fn line_bundle_poly(a: i64, degrees: &[i64], sigma_hat: &[Rational]) -> Result<RationalPolynomial> {
    let alpha = vec![degrees
        .iter()
        .map(|&b| vec![Rational::from_integer((a + 1).into()), Rational::from_integer(b.into())])
        .collect()];
    let e = NumericalQuiverSheaf::new(1, alpha, None)?;
    sheaf::vertex_reduced_poly(&e, 0, sigma_hat)
}

/// Semistability for a symmetric weight `σ_{ij} = σ̂_j` (with `ρ = σ`).
///
/// Semistability as a quiver sheaf agrees with semistability as a tuple of
/// sheaves, whose most destabilizing subobject is `δ_i(O(max a))` at a vertex
/// maximizing the reduced polynomial of `O(max a)`. Purity is automatic for
/// split bundles.
pub fn symmetric_semistable(model: &P1SheafModel, sigma_hat: &[Rational]) -> Result<SymmetricVerdict> {
    let nv = model.twists.len();
    let sp = StabilityPair::symmetric(sigma_hat, nv)?;
    if sigma_hat.len() != model.bundle_degrees.len() {
        return Err(Error::ShapeMismatch("σ̂ needs one entry per bundle".into()));
    }
    let numeric = p1_sheaf_to_numeric(model);
    if numeric.is_zero() {
        return Err(Error::Precondition("every vertex is zero".into()));
    }
    let reduced = sheaf::reduced_poly(&numeric, &sp)?;
    let mut vertex_polys = Vec::with_capacity(nv);
    let mut best: Option<(usize, i64, RationalPolynomial)> = None;
    for (i, tw) in model.twists.iter().enumerate() {
        if tw.is_empty() {
            vertex_polys.push(None);
            continue;
        }
        vertex_polys.push(Some(sheaf::vertex_reduced_poly(&numeric, i, sigma_hat)?));
        let amax = *tw.iter().max().unwrap();
        let p = line_bundle_poly(amax, &model.bundle_degrees, sigma_hat)?;
        if best.as_ref().is_none_or(|(_, _, q)| p.lex_compare(q) == Ordering::Greater) {
            best = Some((i, amax, p));
        }
    }
    let (vertex, amax, top) = best.expect("some vertex is nonzero");
    if top.lex_compare(&reduced) != Ordering::Greater {
        return Ok(SymmetricVerdict { semistable: true, reduced, vertex_polys, witness: None, witness_poly: None });
    }
    let uniform = model.twists[vertex].iter().all(|&a| a == amax);
    let (witness, witness_poly) = if uniform {
        (SymmetricWitness::Delta { vertex }, vertex_polys[vertex].clone())
    } else {
        (SymmetricWitness::PerVertex { vertex, twist: amax }, Some(top))
    };
    Ok(SymmetricVerdict { semistable: false, reduced, vertex_polys, witness: Some(witness), witness_poly })
}

/// Sheaf-model file format. The quiver is resolved by the caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct P1ModelSpec {
    pub model: String,
    /// Path to a quiver file or an inline quiver description.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quiver: Option<serde_json::Value>,
    pub bundle_degrees: Vec<i64>,
    #[serde(default)]
    pub vertices: BTreeMap<String, VertexTwists>,
    #[serde(default)]
    pub arrows: BTreeMap<String, ArrowForms>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexTwists {
    pub twists: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowForms {
    /// Entries are `{"coeffs": [...]}` on `x^e, …, y^e`, or `null` for zero.
    pub matrix: Vec<Vec<Option<FormSpec>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub coeffs: Vec<RationalValue>,
}

impl P1SheafModel {
    pub fn from_spec(spec: &P1ModelSpec, quiver: Arc<LabeledQuiver>) -> Result<Self> {
        if spec.model != "P1" {
            return Err(Error::InvalidParameter(format!("unsupported model {:?}", spec.model)));
        }
        for id in spec.vertices.keys() {
            quiver.vertex_index(id)?;
        }
        for id in spec.arrows.keys() {
            quiver.arrow_index(id)?;
        }
        let twists: Vec<Vec<i64>> = quiver
            .vertices()
            .iter()
            .map(|v| spec.vertices.get(v).map(|t| t.twists.clone()).unwrap_or_default())
            .collect();
        let mut arrows = Vec::with_capacity(quiver.num_arrows());
        for a in quiver.arrows() {
            let (src, dst) = (&twists[a.src], &twists[a.dst]);
            let Some(spec_m) = spec.arrows.get(&a.id) else {
                arrows.push(zero_matrix(src, dst));
                continue;
            };
            let rows_ok = spec_m.matrix.len() == dst.len() || (spec_m.matrix.is_empty() && (src.is_empty() || dst.is_empty()));
            if !rows_ok || spec_m.matrix.iter().any(|r| r.len() != src.len()) {
                return Err(Error::ShapeMismatch(format!("arrow {} needs a {}x{} matrix", a.id, dst.len(), src.len())));
            }
            let mut m = zero_matrix(src, dst);
            for (t, row) in spec_m.matrix.iter().enumerate() {
                for (s, entry) in row.iter().enumerate() {
                    let deg = dst[t] - src[s];
                    if let Some(f) = entry {
                        let coeffs: Vec<Rational> = f.coeffs.iter().map(|c| c.0.clone()).collect();
                        if deg < 0 && coeffs.iter().all(|c| c.is_zero()) {
                            continue;
                        }
                        m[t][s] = BinaryForm::new(deg, coeffs).ok_or_else(|| {
                            Error::DegreeMismatch(format!(
                                "arrow {} entry ({t},{s}) must have {} coefficients",
                                a.id,
                                deg.max(-1) + 1
                            ))
                        })?;
                    }
                }
            }
            arrows.push(m);
        }
        Self::new(quiver, spec.bundle_degrees.clone(), twists, arrows)
    }

    /// The file representation; the caller fills in the quiver reference.
    pub fn to_spec(&self) -> P1ModelSpec {
        let vertices = self
            .quiver
            .vertices()
            .iter()
            .zip(&self.twists)
            .map(|(v, t)| (v.clone(), VertexTwists { twists: t.clone() }))
            .collect();
        let arrows = self
            .quiver
            .arrows()
            .iter()
            .zip(&self.arrows)
            .map(|(a, m)| {
                let matrix = m
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|f| {
                                (!f.is_zero()).then(|| FormSpec { coeffs: f.coeffs().iter().cloned().map(RationalValue).collect() })
                            })
                            .collect()
                    })
                    .collect();
                (a.id.clone(), ArrowForms { matrix })
            })
            .collect();
        P1ModelSpec { model: "P1".into(), quiver: None, bundle_degrees: self.bundle_degrees.clone(), vertices, arrows }
    }
}

/// Convenience: the multiplication-by-a-form arrow between two line bundles.
pub fn scalar_form(degree: i64, coeffs: &[i64]) -> Option<BinaryForm> {
    BinaryForm::new(degree, coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
}

/// `1` as a degree-zero form.
pub fn unit_form() -> BinaryForm {
    BinaryForm::new(0, vec![Rational::one()]).unwrap()
}
