//! File formats: quiver, representation, numerical sheaf, P¹ model, cone,
//! family and walls files, plus the JSON encodings shared by all reports.
//!
//! A `"quiver"` field is either a path (resolved against the directory of the
//! referencing file) or an inline quiver description. Every file may carry an
//! optional `"schema"` tag of the form `qsl/<kind>/v1`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num::{Signed, Zero};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{Field, Fp, Matrix, Subspace, QQ};
use crate::p1::{P1ModelSpec, P1SheafModel};
use crate::poly::RationalPolynomial;
use crate::quiver::{validate_quiver, LabeledQuiver, QuiverSpec};
use crate::rational::{format_rational, parse_list, parse_rational, Rational, RationalValue};
use crate::rep::{FiniteFieldRep, Representation, SubRep};
use crate::sheaf::NumericalQuiverSheaf;
use crate::walls::{Cone, FamilyPair, WallPolynomial};

pub const SCHEMA_VERSION: &str = "v1";

pub fn schema_tag(kind: &str) -> String {
    format!("qsl/{kind}/{SCHEMA_VERSION}")
}

fn check_tag(found: &Option<String>, kind: &str) -> Result<()> {
    match found {
        Some(t) if *t != schema_tag(kind) => Err(Error::Parse(format!("expected schema {}, found {t}", schema_tag(kind)))),
        _ => Ok(()),
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Pretty JSON with a trailing newline; key order is deterministic.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Parses `"a,b;c,d"` into rows split on `;`.
pub fn parse_matrix(s: &str) -> Result<Vec<Vec<Rational>>> {
    s.split(';').map(|row| row.split(',').map(parse_rational).collect()).collect()
}

/// Parses a quiver file, accepting an optional schema tag.
pub fn quiver_from_value(v: &Value) -> Result<LabeledQuiver> {
    let mut v = v.clone();
    if let Some(obj) = v.as_object_mut() {
        if let Some(tag) = obj.remove("schema") {
            check_tag(&tag.as_str().map(str::to_string), "quiver")?;
        }
    }
    let spec: QuiverSpec = serde_json::from_value(v).map_err(|e| Error::Parse(format!("quiver: {e}")))?;
    validate_quiver(&spec)
}

pub fn read_quiver(path: &Path) -> Result<LabeledQuiver> {
    quiver_from_value(&read_json::<Value>(path)?)
}

/// Resolves a `"quiver"` field against `base`.
pub fn resolve_quiver(v: &Value, base: &Path) -> Result<LabeledQuiver> {
    match v {
        Value::String(p) => read_quiver(&base.join(p)),
        Value::Object(_) => quiver_from_value(v),
        _ => Err(Error::Parse("\"quiver\" must be a path or an inline quiver".into())),
    }
}

pub fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn quiver_value(q: &LabeledQuiver) -> Value {
    serde_json::to_value(q.to_spec()).expect("quiver spec serializes")
}

/// A map out of an arrow: one matrix, or one per label basis vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixEntry<T> {
    Single(Vec<Vec<T>>),
    Labeled(Vec<Vec<Vec<T>>>),
}

/// Representation file over `F_p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub p: u64,
    pub quiver: Value,
    pub dims: BTreeMap<String, usize>,
    #[serde(default)]
    pub matrices: BTreeMap<String, MatrixEntry<i64>>,
}

fn build_maps<F: Field, T>(
    field: &F,
    q: &LabeledQuiver,
    dims: &[usize],
    matrices: &BTreeMap<String, MatrixEntry<T>>,
    conv: impl Fn(&T) -> F::Elem,
) -> Result<Vec<Vec<Matrix<F>>>> {
    for id in matrices.keys() {
        q.arrow_index(id)?;
    }
    q.arrows()
        .iter()
        .map(|a| {
            let (r, c) = (dims[a.dst], dims[a.src]);
            let list: Vec<&Vec<Vec<T>>> = match matrices.get(&a.id) {
                None => return Ok(vec![Matrix::zeros(field, r, c); a.label_dim]),
                Some(MatrixEntry::Single(m)) => vec![m],
                Some(MatrixEntry::Labeled(ms)) => ms.iter().collect(),
            };
            if list.len() != a.label_dim {
                return Err(Error::ShapeMismatch(format!("arrow {} needs {} matrices", a.id, a.label_dim)));
            }
            list.into_iter()
                .map(|m| {
                    // an empty list stands for a matrix with no rows
                    if m.is_empty() && r == 0 {
                        return Ok(Matrix::zeros(field, r, c));
                    }
                    let rows = m.iter().map(|row| row.iter().map(&conv).collect()).collect();
                    Matrix::from_rows(field, r, c, rows)
                        .map_err(|_| Error::ShapeMismatch(format!("arrow {} needs {r}x{c} matrices", a.id)))
                })
                .collect()
        })
        .collect()
}

fn dims_of(q: &LabeledQuiver, dims: &BTreeMap<String, usize>) -> Result<Vec<usize>> {
    for id in dims.keys() {
        q.vertex_index(id)?;
    }
    Ok(q.vertices().iter().map(|v| dims.get(v).copied().unwrap_or(0)).collect())
}

/// Builds a representation from a rep file, checking the quiver's relations.
pub fn rep_from_file(file: &RepFile, base: &Path) -> Result<FiniteFieldRep> {
    check_tag(&file.schema, "rep")?;
    let field = Fp::new(file.p)?;
    let q = resolve_quiver(&file.quiver, base)?;
    let dims = dims_of(&q, &file.dims)?;
    let maps = build_maps(&field, &q, &dims, &file.matrices, |x| field.elem(*x))?;
    Representation::new(field, Arc::new(q), dims, maps)
}

pub fn read_rep(path: &Path) -> Result<FiniteFieldRep> {
    rep_from_file(&read_json(path)?, &base_dir(path))
}

fn entry_of<F: Field, T>(mats: &[Matrix<F>], conv: impl Fn(&F::Elem) -> T) -> MatrixEntry<T> {
    let dense = |m: &Matrix<F>| m.to_rows().iter().map(|r| r.iter().map(&conv).collect()).collect();
    if mats.len() == 1 {
        MatrixEntry::Single(dense(&mats[0]))
    } else {
        MatrixEntry::Labeled(mats.iter().map(dense).collect())
    }
}

/// A rep file with the quiver inlined.
pub fn rep_to_file(rep: &FiniteFieldRep) -> RepFile {
    let q = rep.quiver();
    RepFile {
        schema: Some(schema_tag("rep")),
        p: rep.field().p() as u64,
        quiver: quiver_value(q),
        dims: q.vertices().iter().cloned().zip(rep.dims().iter().copied()).collect(),
        matrices: q.arrows().iter().zip(rep.maps()).map(|(a, m)| (a.id.clone(), entry_of(m, |&x| x as i64))).collect(),
    }
}

/// Numerical quiver sheaf file: `alpha[i][j]` lists `α_d, …, α_0` for vertex
/// `i` and bundle `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub dim: usize,
    pub alpha: Vec<Vec<Vec<RationalValue>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranks: Option<Vec<RationalValue>>,
}

impl SheafFile {
    pub fn to_sheaf(&self) -> Result<NumericalQuiverSheaf> {
        check_tag(&self.schema, "sheaf")?;
        let mut alpha = Vec::with_capacity(self.alpha.len());
        for (i, vertex) in self.alpha.iter().enumerate() {
            let mut rows = Vec::with_capacity(vertex.len());
            for (j, coeffs) in vertex.iter().enumerate() {
                if coeffs.len() != self.dim + 1 {
                    return Err(Error::ShapeMismatch(format!("alpha[{i}][{j}] needs {} entries", self.dim + 1)));
                }
                rows.push(coeffs.iter().rev().map(|c| c.0.clone()).collect());
            }
            alpha.push(rows);
        }
        let ranks = self.ranks.as_ref().map(|r| r.iter().map(|c| c.0.clone()).collect());
        NumericalQuiverSheaf::new(self.dim, alpha, ranks)
    }

    pub fn from_sheaf(e: &NumericalQuiverSheaf) -> Self {
        SheafFile {
            schema: Some(schema_tag("sheaf")),
            dim: e.dim(),
            alpha: e
                .alphas()
                .iter()
                .map(|v| v.iter().map(|c| c.iter().rev().cloned().map(RationalValue).collect()).collect())
                .collect(),
            ranks: e.ranks().map(|r| r.iter().cloned().map(RationalValue).collect()),
        }
    }
}

pub fn read_sheaf(path: &Path) -> Result<NumericalQuiverSheaf> {
    read_json::<SheafFile>(path)?.to_sheaf()
}

/// Reads a P¹ sheaf model; its `"quiver"` field is required.
pub fn read_model(path: &Path) -> Result<P1SheafModel> {
    let mut v: Value = read_json(path)?;
    if let Some(obj) = v.as_object_mut() {
        if let Some(tag) = obj.remove("schema") {
            check_tag(&tag.as_str().map(str::to_string), "p1-model")?;
        }
    }
    let spec: P1ModelSpec = serde_json::from_value(v).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let qv = spec.quiver.as_ref().ok_or_else(|| Error::Parse("sheaf model needs a \"quiver\" field".into()))?;
    let q = resolve_quiver(qv, &base_dir(path))?;
    P1SheafModel::from_spec(&spec, Arc::new(q))
}

/// Cone file: `{σ ≥ 0 : a·σ ≥ 0}` for the listed rows `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub dim: usize,
    #[serde(default)]
    pub inequalities: Vec<Vec<RationalValue>>,
}

impl ConeFile {
    pub fn to_cone(&self) -> Result<Cone> {
        check_tag(&self.schema, "cone")?;
        Cone::new(self.dim, self.inequalities.iter().map(|r| r.iter().map(|c| c.0.clone()).collect()).collect())
    }
}

pub fn read_cone(path: &Path) -> Result<Cone> {
    read_json::<ConeFile>(path)?.to_cone()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub label: String,
    pub ambient: SheafFile,
    pub sub: SheafFile,
}

/// Family file: the pairs `(E, F)` generating the walls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub pairs: Vec<PairSpec>,
}

impl FamilyFile {
    pub fn to_family(&self) -> Result<Vec<FamilyPair>> {
        check_tag(&self.schema, "family")?;
        self.pairs
            .iter()
            .map(|p| Ok(FamilyPair { label: p.label.clone(), ambient: p.ambient.to_sheaf()?, sub: p.sub.to_sheaf()? }))
            .collect()
    }
}

pub fn read_family(path: &Path) -> Result<Vec<FamilyPair>> {
    read_json::<FamilyFile>(path)?.to_family()
}

/// One wall equation. Walls reports carry extra fields, which are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallSpec {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<Vec<RationalValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratic: Option<Vec<Vec<RationalValue>>>,
}

/// Walls file; a walls report is accepted as well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub walls: Vec<WallSpec>,
}

impl WallsFile {
    /// The equations, preferring the linear form when both are given.
    pub fn to_walls(&self) -> Result<Vec<(String, WallPolynomial)>> {
        match self.schema.as_deref() {
            None => {}
            Some(t) if t == schema_tag("walls") || t == schema_tag("walls-report") => {}
            Some(t) => return Err(Error::Parse(format!("unexpected schema {t} for a walls file"))),
        }
        self.walls
            .iter()
            .map(|w| {
                let poly = match (&w.linear, &w.quadratic) {
                    (Some(l), _) => WallPolynomial::Linear(l.iter().map(|c| c.0.clone()).collect()),
                    (None, Some(q)) => {
                        let m: Vec<Vec<Rational>> = q.iter().map(|r| r.iter().map(|c| c.0.clone()).collect()).collect();
                        if m.iter().any(|r| r.len() != m.len()) {
                            return Err(Error::ShapeMismatch(format!("wall {} needs a square matrix", w.label)));
                        }
                        let sym = (0..m.len())
                            .map(|a| (0..m.len()).map(|b| (&m[a][b] + &m[b][a]) / Rational::from_integer(2.into())).collect())
                            .collect();
                        WallPolynomial::Quadratic(sym)
                    }
                    (None, None) => return Err(Error::Parse(format!("wall {} has no equation", w.label))),
                };
                Ok((w.label.clone(), poly))
            })
            .collect()
    }
}

pub fn read_walls(path: &Path) -> Result<Vec<(String, WallPolynomial)>> {
    read_json::<WallsFile>(path)?.to_walls()
}

/// Subrepresentation of an embedded representation: either a coordinate
/// subsheaf (`summands` per source vertex) or explicit bases per vertex of
/// the twisted quiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubrepFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summands: Option<BTreeMap<String, Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spaces: Option<BTreeMap<String, Vec<Vec<RationalValue>>>>,
}

/// Resolves a subrep file against an embedded representation.
pub fn subrep_from_file(file: &SubrepFile, tr: &crate::embedding::TwistedRep) -> Result<SubRep<QQ>> {
    check_tag(&file.schema, "subrep")?;
    match (&file.summands, &file.spaces) {
        (Some(sel), None) => {
            let src = &tr.twisted.source;
            for id in sel.keys() {
                src.vertex_index(id)?;
            }
            let selection: Vec<Vec<usize>> =
                src.vertices().iter().map(|v| sel.get(v).cloned().unwrap_or_default()).collect();
            tr.subsheaf_subrep(&selection)
        }
        (None, Some(spaces)) => {
            let q = &tr.twisted.quiver;
            for id in spaces.keys() {
                q.vertex_index(id)?;
            }
            let subs = q
                .vertices()
                .iter()
                .zip(tr.rep.dims())
                .map(|(v, &n)| {
                    let vecs: Vec<Vec<Rational>> = spaces
                        .get(v)
                        .map(|b| b.iter().map(|r| r.iter().map(|c| c.0.clone()).collect()).collect())
                        .unwrap_or_default();
                    if vecs.iter().any(|x| x.len() != n) {
                        return Err(Error::ShapeMismatch(format!("vectors at {v} need {n} entries")));
                    }
                    Ok(Subspace::span(&QQ, n, &vecs))
                })
                .collect::<Result<Vec<_>>>()?;
            tr.rep.subrep(subs)
        }
        _ => Err(Error::Parse("subrep file needs exactly one of \"summands\" and \"spaces\"".into())),
    }
}

pub fn rational_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn rationals_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_json).collect())
}

pub fn rational_matrix_json(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|r| rationals_json(r)).collect())
}

pub fn poly_json(p: &RationalPolynomial) -> Value {
    json!({ "coeffs": rationals_json(p.coeffs()), "display": p.to_string() })
}

pub fn ordering_json(o: std::cmp::Ordering) -> Value {
    Value::String(
        match o {
            std::cmp::Ordering::Less => "less",
            std::cmp::Ordering::Equal => "equal",
            std::cmp::Ordering::Greater => "greater",
        }
        .into(),
    )
}

/// Dimensions and bases of a subrepresentation, keyed by vertex id.
pub fn subrep_json<F: Field>(q: &LabeledQuiver, s: &SubRep<F>, enc: impl Fn(&F::Elem) -> Value) -> Value {
    let dims: serde_json::Map<String, Value> =
        q.vertices().iter().zip(s.dims()).map(|(v, d)| (v.clone(), json!(d))).collect();
    let bases: serde_json::Map<String, Value> = q
        .vertices()
        .iter()
        .zip(s.bases())
        .map(|(v, b)| (v.clone(), Value::Array(b.iter().map(|x| Value::Array(x.iter().map(&enc).collect())).collect())))
        .collect();
    json!({ "dims": dims, "bases": bases })
}

pub fn fp_json(x: &u8) -> Value {
    json!(x)
}

pub fn dims_json(q: &LabeledQuiver, dims: &[usize]) -> Value {
    Value::Object(q.vertices().iter().zip(dims).map(|(v, d)| (v.clone(), json!(d))).collect())
}

/// Rational maps of a representation, keyed by arrow id.
pub fn rational_maps_json(rep: &Representation<QQ>) -> Value {
    let q = rep.quiver();
    Value::Object(
        q.arrows()
            .iter()
            .zip(rep.maps())
            .map(|(a, ms)| {
                let v = match entry_of(ms, format_rational) {
                    MatrixEntry::Single(m) => json!(m),
                    MatrixEntry::Labeled(m) => json!(m),
                };
                (a.id.clone(), v)
            })
            .collect(),
    )
}

/// Parses a θ given either as a comma list in vertex order or `id=value` pairs.
pub fn parse_theta(s: &str, q: &LabeledQuiver) -> Result<Vec<Rational>> {
    if s.contains('=') {
        let mut out = vec![Rational::zero(); q.num_vertices()];
        for part in s.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("cannot read θ entry {part:?}")))?;
            out[q.vertex_index(k.trim())?] = parse_rational(v)?;
        }
        return Ok(out);
    }
    let v = parse_list(s)?;
    if v.len() != q.num_vertices() {
        return Err(Error::ShapeMismatch(format!("θ needs {} entries", q.num_vertices())));
    }
    Ok(v)
}

/// True iff every entry is non-negative.
pub fn is_nonnegative(v: &[Rational]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    const A2: &str = r#"{"vertices":["1","2"],"arrows":[{"id":"a","src":"1","dst":"2"}]}"#;

    #[test]
    fn rep_round_trip() {
        let text = format!(r#"{{"p":2,"quiver":{A2},"dims":{{"1":1,"2":1}},"matrices":{{"a":[[1]]}}}}"#);
        let file: RepFile = parse_json(&text).unwrap();
        let rep = rep_from_file(&file, Path::new(".")).unwrap();
        assert_eq!(rep.dims(), &[1, 1]);
        let back = rep_to_file(&rep);
        assert_eq!(rep_from_file(&back, Path::new(".")).unwrap().maps(), rep.maps());
        let bad = text.replace("[[1]]", "[[1,0]]");
        assert!(matches!(rep_from_file(&parse_json(&bad).unwrap(), Path::new(".")), Err(Error::ShapeMismatch(_))));
        let unknown = text.replace("\"a\":", "\"b\":");
        assert!(matches!(rep_from_file(&parse_json(&unknown).unwrap(), Path::new(".")), Err(Error::UnknownArrow(_))));
    }

    #[test]
    fn sheaf_descending() {
        let f: SheafFile = parse_json(r#"{"dim":1,"alpha":[[["2","4"],[4,4]]],"ranks":[2]}"#).unwrap();
        let e = f.to_sheaf().unwrap();
        assert_eq!(e.alpha(0, 0, 1), &int(2));
        assert_eq!(e.alpha(0, 0, 0), &int(4));
        assert_eq!(SheafFile::from_sheaf(&e).to_sheaf().unwrap(), e);
    }

    #[test]
    fn walls_and_theta() {
        let w: WallsFile = parse_json(r#"{"walls":[{"label":"w","linear":["-1","1"],"extra":1}]}"#).unwrap();
        assert_eq!(w.to_walls().unwrap()[0].1, WallPolynomial::Linear(vec![int(-1), int(1)]));
        let q = quiver_from_value(&parse_json(A2).unwrap()).unwrap();
        assert_eq!(parse_theta("1,-1", &q).unwrap(), vec![int(1), int(-1)]);
        assert_eq!(parse_theta("2=3", &q).unwrap(), vec![int(0), int(3)]);
        assert_eq!(parse_matrix("1,2;3,4").unwrap()[1], vec![int(3), int(4)]);
    }
}
