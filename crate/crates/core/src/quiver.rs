//! Labeled quivers with relations, paths, and the auxiliary and twisted quiver
//! constructions.
//!
//! Vertex and arrow ids are opaque strings externally and dense indices
//! internally. A path is stored in traversal order (the first arrow applied
//! comes first), while the file format and [`Path::written_ids`] use the usual
//! right-to-left notation `γ = α_l … α_1`.

use std::collections::HashMap;
use std::fmt;

use num::{BigInt, Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{common_denominator, Rational, RationalValue};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub src: usize,
    pub dst: usize,
    /// Dimension of the label space; 1 means unlabeled.
    pub label_dim: usize,
}

/// A path, stored in traversal order. Length-zero paths remember their vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    source: usize,
    target: usize,
    arrows: Vec<usize>,
}

impl Path {
    /// The trivial path `e_i`.
    pub fn trivial(vertex: usize) -> Self {
        Path { source: vertex, target: vertex, arrows: Vec::new() }
    }

    /// Builds a path from arrows in traversal order, checking composability.
    pub fn new(q: &LabeledQuiver, arrows: Vec<usize>) -> Result<Self> {
        let first = *arrows
            .first()
            .ok_or_else(|| Error::NotComposable("empty arrow list; use Path::trivial".into()))?;
        for w in arrows.windows(2) {
            if q.arrows[w[0]].dst != q.arrows[w[1]].src {
                return Err(Error::NotComposable(format!(
                    "{} then {}",
                    q.arrows[w[0]].id, q.arrows[w[1]].id
                )));
            }
        }
        let last = *arrows.last().unwrap();
        Ok(Path { source: q.arrows[first].src, target: q.arrows[last].dst, arrows })
    }

    /// Parses ids in written (right-to-left) order.
    pub fn from_written(q: &LabeledQuiver, ids: &[String], vertex: Option<&str>) -> Result<Self> {
        if ids.is_empty() {
            let v = vertex.ok_or_else(|| Error::Parse("length-zero path needs a \"vertex\"".into()))?;
            return Ok(Path::trivial(q.vertex_index(v)?));
        }
        let arrows = ids.iter().rev().map(|id| q.arrow_index(id)).collect::<Result<Vec<_>>>()?;
        Path::new(q, arrows)
    }

    pub fn source(&self) -> usize {
        self.source
    }
    pub fn target(&self) -> usize {
        self.target
    }
    /// Arrow indices in traversal order.
    pub fn arrows(&self) -> &[usize] {
        &self.arrows
    }
    pub fn len(&self) -> usize {
        self.arrows.len()
    }
    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    /// Arrow ids in written order `α_l … α_1`.
    pub fn written_ids(&self, q: &LabeledQuiver) -> Vec<String> {
        self.arrows.iter().rev().map(|&a| q.arrows[a].id.clone()).collect()
    }

    /// `self ∘ other` (first `other`, then `self`), or `None` if not composable.
    pub fn after(&self, other: &Path) -> Option<Path> {
        if other.target != self.source {
            return None;
        }
        let mut arrows = other.arrows.clone();
        arrows.extend_from_slice(&self.arrows);
        Some(Path { source: other.source, target: self.target, arrows })
    }
}

/// A path together with a basis element of its label `H_γ`, one basis index
/// per arrow (traversal order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPath {
    pub path: Path,
    pub label: Vec<usize>,
}

impl LabeledPath {
    pub fn trivial(vertex: usize) -> Self {
        LabeledPath { path: Path::trivial(vertex), label: Vec::new() }
    }
}

/// Product in the path algebra of `(Q, H)`: `p · q` is "first `q`, then `p`",
/// with the label tensors concatenated in traversal order. Returns `None` for
/// the zero element (non-composable paths).
pub fn compose_paths(quiver: &LabeledQuiver, p: &LabeledPath, q: &LabeledPath) -> Result<Option<LabeledPath>> {
    for lp in [p, q] {
        if lp.label.len() != lp.path.len() {
            return Err(Error::ShapeMismatch("label tuple length differs from path length".into()));
        }
        for (&a, &h) in lp.path.arrows.iter().zip(&lp.label) {
            if h >= quiver.arrows[a].label_dim {
                return Err(Error::InvalidParameter(format!(
                    "label index {h} out of range for arrow {}",
                    quiver.arrows[a].id
                )));
            }
        }
    }
    Ok(p.path.after(&q.path).map(|path| {
        let mut label = q.label.clone();
        label.extend_from_slice(&p.label);
        LabeledPath { path, label }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RelationKind {
    #[default]
    Plain,
    LabeledSquare,
}

/// A linear relation `Σ λ_k γ_k` between paths with common endpoints.
///
/// Stored normalized: like paths merged, coefficients integral and coprime,
/// terms sorted by written arrow ids, first coefficient positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    kind: RelationKind,
    terms: Vec<(Rational, Path)>,
    /// Dimension of the shared label of a labeled square; 1 for plain relations.
    label_dim: usize,
}

impl Relation {
    pub fn new(q: &LabeledQuiver, kind: RelationKind, terms: Vec<(Rational, Path)>, index: usize) -> Result<Self> {
        let bad = |reason: &str| Error::BadRelation { index, reason: reason.to_string() };
        let mut merged: Vec<(Rational, Path)> = Vec::new();
        for (c, p) in terms {
            match merged.iter_mut().find(|(_, mp)| *mp == p) {
                Some((mc, _)) => *mc += c,
                None => merged.push((c, p)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        if merged.is_empty() {
            return Err(bad("relation has no nonzero terms"));
        }
        let (s, t) = (merged[0].1.source, merged[0].1.target);
        if merged.iter().any(|(_, p)| p.source != s || p.target != t) {
            return Err(bad("paths do not share source and target"));
        }
        // integral, coprime coefficients
        let l = Rational::from_integer(common_denominator(merged.iter().map(|(c, _)| c)));
        for (c, _) in merged.iter_mut() {
            *c = &*c * &l;
        }
        let g = merged.iter().fold(BigInt::zero(), |acc, (c, _)| acc.gcd(c.numer()));
        let g = Rational::from_integer(g);
        for (c, _) in merged.iter_mut() {
            *c = &*c / &g;
        }
        merged.sort_by(|a, b| a.1.written_ids(q).cmp(&b.1.written_ids(q)));
        if merged[0].0.is_negative() {
            for (c, _) in merged.iter_mut() {
                *c = -&*c;
            }
        }

        let label_dim = match kind {
            RelationKind::Plain => {
                for (_, p) in &merged {
                    if let Some(&a) = p.arrows.iter().find(|&&a| q.arrows[a].label_dim != 1) {
                        return Err(bad(&format!(
                            "plain relation uses labeled arrow {}; only labeled squares may involve labels",
                            q.arrows[a].id
                        )));
                    }
                }
                1
            }
            RelationKind::LabeledSquare => square_label_dim(q, &merged).ok_or_else(|| {
                bad("labeled square must be γα − δβ with α, δ sharing a label and β, γ unlabeled")
            })?,
        };
        Ok(Relation { kind, terms: merged, label_dim })
    }

    pub fn kind(&self) -> RelationKind {
        self.kind
    }
    pub fn terms(&self) -> &[(Rational, Path)] {
        &self.terms
    }
    pub fn label_dim(&self) -> usize {
        self.label_dim
    }
    pub fn source(&self) -> usize {
        self.terms[0].1.source
    }
    pub fn target(&self) -> usize {
        self.terms[0].1.target
    }
}

fn square_label_dim(q: &LabeledQuiver, terms: &[(Rational, Path)]) -> Option<usize> {
    if terms.len() != 2 || terms.iter().any(|(_, p)| p.len() != 2) {
        return None;
    }
    if terms[0].0 != -terms[1].0.clone() {
        return None;
    }
    let dim = |a: usize| q.arrows[a].label_dim;
    // term `x` is γα (labeled arrow first), term `y` is δβ (labeled arrow last)
    let fits = |x: &Path, y: &Path| {
        let (alpha, gamma) = (x.arrows[0], x.arrows[1]);
        let (beta, delta) = (y.arrows[0], y.arrows[1]);
        (dim(alpha) == dim(delta) && dim(beta) == 1 && dim(gamma) == 1).then(|| dim(alpha))
    };
    fits(&terms[0].1, &terms[1].1).or_else(|| fits(&terms[1].1, &terms[0].1))
}

/// A finite quiver with arrow labels (by dimension) and relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledQuiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    relations: Vec<Relation>,
    vertex_lookup: HashMap<String, usize>,
    arrow_lookup: HashMap<String, usize>,
}

impl LabeledQuiver {
    /// Builds a quiver without relations, validating ids and endpoints.
    pub fn new(vertices: Vec<String>, arrows: Vec<(String, String, String, usize)>) -> Result<Self> {
        let mut vertex_lookup = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_lookup.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateId(v.clone()));
            }
        }
        let mut arrow_lookup = HashMap::new();
        let mut out = Vec::with_capacity(arrows.len());
        for (i, (id, src, dst, label_dim)) in arrows.into_iter().enumerate() {
            let look = |v: &String| {
                vertex_lookup
                    .get(v)
                    .copied()
                    .ok_or_else(|| Error::DanglingVertex { vertex: v.clone(), by: format!("arrow {id}") })
            };
            let (s, t) = (look(&src)?, look(&dst)?);
            if arrow_lookup.insert(id.clone(), i).is_some() || vertex_lookup.contains_key(&id) {
                return Err(Error::DuplicateId(id));
            }
            out.push(Arrow { id, src: s, dst: t, label_dim });
        }
        Ok(LabeledQuiver { vertices, arrows: out, relations: Vec::new(), vertex_lookup, arrow_lookup })
    }

    pub fn with_relations(mut self, relations: Vec<Relation>) -> Self {
        self.relations = relations;
        self
    }

    pub fn push_relation(&mut self, kind: RelationKind, terms: Vec<(Rational, Path)>) -> Result<()> {
        let r = Relation::new(self, kind, terms, self.relations.len())?;
        self.relations.push(r);
        Ok(())
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }
    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }
    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertex_lookup.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn arrow_index(&self, id: &str) -> Result<usize> {
        self.arrow_lookup.get(id).copied().ok_or_else(|| Error::UnknownArrow(id.to_string()))
    }

    pub fn is_unlabeled(&self) -> bool {
        self.arrows.iter().all(|a| a.label_dim == 1)
    }

    /// True iff the quiver has no oriented cycle (loops count as cycles).
    pub fn is_acyclic(&self) -> bool {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let n = self.vertices.len();
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for a in &self.arrows {
            out[a.src].push(a.dst);
        }
        let mut mark = vec![Mark::New; n];
        for root in 0..n {
            if mark[root] != Mark::New {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            mark[root] = Mark::Active;
            while let Some((v, next)) = stack.last_mut() {
                let v = *v;
                if *next < out[v].len() {
                    let w = out[v][*next];
                    *next += 1;
                    match mark[w] {
                        Mark::Active => return false,
                        Mark::New => {
                            mark[w] = Mark::Active;
                            stack.push((w, 0));
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[v] = Mark::Done;
                    stack.pop();
                }
            }
        }
        true
    }

    /// `(dim R_d, dim G_d)`: the representation variety and the gauge group.
    pub fn rep_variety_dims(&self, d: &[usize]) -> Result<(u128, u128)> {
        if d.len() != self.vertices.len() {
            return Err(Error::ShapeMismatch(format!(
                "dimension vector has {} entries, quiver has {} vertices",
                d.len(),
                self.vertices.len()
            )));
        }
        let r = self
            .arrows
            .iter()
            .map(|a| d[a.src] as u128 * d[a.dst] as u128 * a.label_dim as u128)
            .sum();
        let g = d.iter().map(|&x| (x as u128) * (x as u128)).sum();
        Ok((r, g))
    }

    /// Serializable description in the quiver file format.
    pub fn to_spec(&self) -> QuiverSpec {
        QuiverSpec {
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowSpec {
                    id: a.id.clone(),
                    src: self.vertices[a.src].clone(),
                    dst: self.vertices[a.dst].clone(),
                    label_dim: a.label_dim,
                })
                .collect(),
            relations: self.relations.iter().map(|r| self.relation_spec(r)).collect(),
        }
    }

    pub fn relation_spec(&self, r: &Relation) -> RelationSpec {
        RelationSpec {
            kind: r.kind,
            terms: r
                .terms
                .iter()
                .map(|(c, p)| TermSpec {
                    coeff: RationalValue(c.clone()),
                    path: p.written_ids(self),
                    vertex: p.is_empty().then(|| self.vertices[p.source].clone()),
                })
                .collect(),
        }
    }
}

impl fmt::Display for LabeledQuiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "quiver with {} vertices, {} arrows, {} relations", self.vertices.len(), self.arrows.len(), self.relations.len())
    }
}

/// Quiver file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverSpec {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub arrows: Vec<ArrowSpec>,
    #[serde(default)]
    pub relations: Vec<RelationSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    pub id: String,
    pub src: String,
    pub dst: String,
    #[serde(default = "one_usize")]
    pub label_dim: usize,
}

fn one_usize() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationSpec {
    #[serde(default)]
    pub kind: RelationKind,
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: RationalValue,
    /// Arrow ids in written order `α_l … α_1`.
    pub path: Vec<String>,
    /// Base vertex, required only for a length-zero path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
}

/// Validates a raw quiver description.
pub fn validate_quiver(spec: &QuiverSpec) -> Result<LabeledQuiver> {
    let arrows = spec
        .arrows
        .iter()
        .map(|a| (a.id.clone(), a.src.clone(), a.dst.clone(), a.label_dim))
        .collect();
    let mut q = LabeledQuiver::new(spec.vertices.clone(), arrows)?;
    for (index, r) in spec.relations.iter().enumerate() {
        let terms = r
            .terms
            .iter()
            .map(|t| {
                let p = Path::from_written(&q, &t.path, t.vertex.as_deref()).map_err(|e| Error::BadRelation {
                    index,
                    reason: e.to_string(),
                })?;
                Ok((t.coeff.0.clone(), p))
            })
            .collect::<Result<Vec<_>>>()?;
        let rel = Relation::new(&q, r.kind, terms, index)?;
        q.relations.push(rel);
    }
    Ok(q)
}

/// Result of replacing every labeled arrow by `label_dim` parallel unlabeled copies.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub quiver: LabeledQuiver,
    /// For each original arrow, its copies in basis order.
    pub copies: Vec<Vec<usize>>,
    /// For each expanded arrow, the original arrow and the basis index.
    pub origin: Vec<(usize, usize)>,
}

/// Expands a labeled quiver into an unlabeled one using the canonical label
/// bases. Unlabeled arrows keep their ids; copies of a labeled arrow `a` are
/// named `a#1, …, a#h`.
pub fn expand_labeled(q: &LabeledQuiver) -> Expansion {
    let mut arrows = Vec::new();
    let mut copies = Vec::with_capacity(q.arrows.len());
    let mut origin = Vec::new();
    for (ai, a) in q.arrows.iter().enumerate() {
        let mut mine = Vec::with_capacity(a.label_dim);
        for k in 0..a.label_dim {
            let id = if a.label_dim == 1 { a.id.clone() } else { format!("{}#{}", a.id, k + 1) };
            mine.push(arrows.len());
            origin.push((ai, k));
            arrows.push(Arrow { id, src: a.src, dst: a.dst, label_dim: 1 });
        }
        copies.push(mine);
    }
    let mut out = LabeledQuiver {
        vertices: q.vertices.clone(),
        arrow_lookup: arrows.iter().enumerate().map(|(i, a)| (a.id.clone(), i)).collect(),
        vertex_lookup: q.vertex_lookup.clone(),
        arrows,
        relations: Vec::new(),
    };
    for r in &q.relations {
        for k in 0..r.label_dim {
            let terms = r
                .terms
                .iter()
                .map(|(c, p)| {
                    let arrows: Vec<usize> = p
                        .arrows
                        .iter()
                        .map(|&a| if q.arrows[a].label_dim == 1 { copies[a][0] } else { copies[a][k] })
                        .collect();
                    let path = if arrows.is_empty() { Path::trivial(p.source) } else { Path { source: p.source, target: p.target, arrows } };
                    (c.clone(), path)
                })
                .collect();
            let idx = out.relations.len();
            let rel = Relation::new(&out, RelationKind::Plain, terms, idx)
                .expect("expansion of a valid relation is valid");
            out.relations.push(rel);
        }
    }
    Expansion { quiver: out, copies, origin }
}

/// The auxiliary quiver with `N` rows: vertices `v1..vN, w1..wN` and arrows
/// `phi_k_l : v_k → w_l` carrying labels of the given dimensions.
pub fn build_auxiliary(rows: usize, label_dims: &[Vec<usize>]) -> Result<LabeledQuiver> {
    check_label_grid(rows, label_dims)?;
    let mut vertices: Vec<String> = (1..=rows).map(|k| format!("v{k}")).collect();
    vertices.extend((1..=rows).map(|k| format!("w{k}")));
    let mut arrows = Vec::new();
    for k in 1..=rows {
        for l in 1..=rows {
            arrows.push((format!("phi_{k}_{l}"), format!("v{k}"), format!("w{l}"), label_dims[k - 1][l - 1]));
        }
    }
    LabeledQuiver::new(vertices, arrows)
}

fn check_label_grid(rows: usize, label_dims: &[Vec<usize>]) -> Result<()> {
    if rows < 1 {
        return Err(Error::InvalidParameter("row count must be at least 1".into()));
    }
    if label_dims.len() != rows || label_dims.iter().any(|r| r.len() != rows) {
        return Err(Error::ShapeMismatch(format!("label dimensions must form a {rows}x{rows} grid")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VertexTag {
    /// `v_{ij}`: sections after twisting by `L_j^n`.
    V { vertex: usize, row: usize },
    /// `w_{ij}`: sections after twisting by `L_j^m`.
    W { vertex: usize, row: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArrowTag {
    /// `φ_{ikl} : v_{ik} → w_{il}`, labeled by `H_{kl}`.
    Phi { vertex: usize, k: usize, l: usize },
    /// `α_k^left : v_{ik} → v_{jk}`.
    Left { arrow: usize, row: usize },
    /// `α_k^right : w_{ik} → w_{jk}`.
    Right { arrow: usize, row: usize },
}

/// The twisted quiver `Q(Q′)`: one copy of the auxiliary quiver per vertex of
/// `Q`, joined by left and right copies of the arrows of `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedQuiver {
    /// The underlying labeled quiver; its relations are `I′₁` followed by `I′₂`.
    pub quiver: LabeledQuiver,
    pub source: LabeledQuiver,
    pub rows: usize,
    pub label_dims: Vec<Vec<usize>>,
    pub vertex_tags: Vec<VertexTag>,
    pub arrow_tags: Vec<ArrowTag>,
    pub i1: Vec<Relation>,
    pub i2: Vec<Relation>,
}

impl TwistedQuiver {
    pub fn v_index(&self, vertex: usize, row: usize) -> usize {
        vertex * self.rows + row
    }
    pub fn w_index(&self, vertex: usize, row: usize) -> usize {
        (self.source.num_vertices() + vertex) * self.rows + row
    }
    pub fn phi_index(&self, vertex: usize, k: usize, l: usize) -> usize {
        (vertex * self.rows + k) * self.rows + l
    }
    pub fn left_index(&self, arrow: usize, row: usize) -> usize {
        self.rows * self.rows * self.source.num_vertices() + arrow * self.rows + row
    }
    pub fn right_index(&self, arrow: usize, row: usize) -> usize {
        self.left_index(self.source.num_arrows(), 0) + arrow * self.rows + row
    }
}

/// Builds `Q(Q′)` for an unlabeled source quiver `Q` with relations `I`.
pub fn build_twisted(q: &LabeledQuiver, rows: usize, label_dims: &[Vec<usize>]) -> Result<TwistedQuiver> {
    check_label_grid(rows, label_dims)?;
    if let Some(a) = q.arrows.iter().find(|a| a.label_dim != 1) {
        return Err(Error::InvalidParameter(format!(
            "source quiver must be unlabeled, arrow {} has label dimension {}",
            a.id, a.label_dim
        )));
    }
    let n0 = q.num_vertices();
    let vid = |z: &str, i: usize, j: usize| format!("{z}[{},{}]", q.vertices[i], j + 1);
    let mut vertices = Vec::with_capacity(2 * n0 * rows);
    let mut vertex_tags = Vec::with_capacity(2 * n0 * rows);
    for z in ["v", "w"] {
        for i in 0..n0 {
            for j in 0..rows {
                vertices.push(vid(z, i, j));
                vertex_tags.push(if z == "v" { VertexTag::V { vertex: i, row: j } } else { VertexTag::W { vertex: i, row: j } });
            }
        }
    }
    let mut arrows = Vec::new();
    let mut arrow_tags = Vec::new();
    for i in 0..n0 {
        for k in 0..rows {
            for l in 0..rows {
                arrows.push((format!("phi[{},{},{}]", q.vertices[i], k + 1, l + 1), vid("v", i, k), vid("w", i, l), label_dims[k][l]));
                arrow_tags.push(ArrowTag::Phi { vertex: i, k, l });
            }
        }
    }
    for (z, tag) in [("v", "left"), ("w", "right")] {
        for (ai, a) in q.arrows.iter().enumerate() {
            for k in 0..rows {
                arrows.push((format!("{}^{tag}[{}]", a.id, k + 1), vid(z, a.src, k), vid(z, a.dst, k), 1));
                arrow_tags.push(if z == "v" { ArrowTag::Left { arrow: ai, row: k } } else { ArrowTag::Right { arrow: ai, row: k } });
            }
        }
    }
    let quiver = LabeledQuiver::new(vertices, arrows)?;
    let mut tq = TwistedQuiver {
        quiver,
        source: q.clone(),
        rows,
        label_dims: label_dims.to_vec(),
        vertex_tags,
        arrow_tags,
        i1: Vec::new(),
        i2: Vec::new(),
    };

    // I′₁: α^right_l φ_{ikl} − φ_{jkl} α^left_k
    let one = Rational::one();
    for (ai, a) in q.arrows.iter().enumerate() {
        for k in 0..rows {
            for l in 0..rows {
                let lhs = Path::new(&tq.quiver, vec![tq.phi_index(a.src, k, l), tq.right_index(ai, l)])?;
                let rhs = Path::new(&tq.quiver, vec![tq.left_index(ai, k), tq.phi_index(a.dst, k, l)])?;
                let idx = tq.i1.len();
                let r = Relation::new(&tq.quiver, RelationKind::LabeledSquare, vec![(one.clone(), lhs), (-one.clone(), rhs)], idx)?;
                tq.i1.push(r);
            }
        }
    }
    // I′₂: left and right copies of every relation of Q, per row
    for r in q.relations() {
        for k in 0..rows {
            for left in [true, false] {
                let terms = r
                    .terms()
                    .iter()
                    .map(|(c, p)| {
                        let path = if p.is_empty() {
                            Path::trivial(if left { tq.v_index(p.source, k) } else { tq.w_index(p.source, k) })
                        } else {
                            let arrows = p
                                .arrows()
                                .iter()
                                .map(|&b| if left { tq.left_index(b, k) } else { tq.right_index(b, k) })
                                .collect();
                            Path::new(&tq.quiver, arrows)?
                        };
                        Ok((c.clone(), path))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let idx = tq.i1.len() + tq.i2.len();
                tq.i2.push(Relation::new(&tq.quiver, RelationKind::Plain, terms, idx)?);
            }
        }
    }
    let all: Vec<Relation> = tq.i1.iter().chain(&tq.i2).cloned().collect();
    tq.quiver.relations = all;
    Ok(tq)
}
