use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::path::Path;

use serde_json::{json, Map, Value};

use qsl::embedding::{embed_p1, theta_from_sigma, AuxSlope, TwistedRep};
use qsl::io::*;
use qsl::linalg::{Fp, QQ};
use qsl::p1::{p1_sheaf_to_numeric, symmetric_semistable};
use qsl::quiver::{build_twisted, expand_labeled, LabeledQuiver};
use qsl::rational::{parse_list, primitive_ray, Rational};
use qsl::rep::{FiniteFieldRep, SubRep};
use qsl::replab::{self, Filtration, StabilityKind};
use qsl::sheaf::{self, NumericalQuiverSheaf, StabilityPair};
use qsl::walls::{self, Cone, FamilyPair, Sign, Space, Triviality, WallForm, WallPolynomial};
use qsl::{Error, Result};

use crate::{Command, ModelNm, RepTheta};

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum SpaceArg {
    Symmetric,
    Full,
}

pub fn run(cmd: &Command, cap: u128) -> Result<String> {
    Ok(match cmd {
        Command::PlotSection { walls, cone, u, v, samples, precision } => plot_section(walls, cone, u, v, *samples, *precision)?,
        other => to_pretty(&report(other, cap)?),
    })
}

fn report(cmd: &Command, cap: u128) -> Result<Value> {
    match cmd {
        Command::Twist { quiver, rows, label_dims } => twist(quiver, *rows, label_dims.as_deref()),
        Command::Expand { quiver } => expand(quiver),
        Command::CheckRep(rt) => check_rep(rt, cap),
        Command::Hn(rt) => hn(rt, cap),
        Command::Jh(rt) => jh(rt, cap),
        Command::SEquiv { first, other } => s_equiv(first, other, cap),
        Command::Hilbert { sheaf, sigma, rho } => hilbert(sheaf, sigma, rho.as_deref()),
        Command::Compare { sheaf, sub, sigma, rho } => compare(sheaf, sub, sigma, rho.as_deref()),
        Command::SymmetricCheck { model, sigma_hat } => symmetric_check(model, sigma_hat),
        Command::Embed { nm, sigma, reduce_mod } => embed(nm, sigma.as_deref(), *reduce_mod),
        Command::Tighten { nm, sigma, sub } => tighten(nm, sigma, sub),
        Command::Walls { family, cone, space, lower_dim } => walls_report(family, cone.as_deref(), *space, *lower_dim),
        Command::Chambers { walls, cone, lower_dim } => chambers(walls, cone, *lower_dim),
        Command::CompareAcross { family, sigma, sigma_prime } => compare_across(family, sigma, sigma_prime),
        Command::PlotSection { .. } => unreachable!("handled by run"),
    }
}

fn tagged(kind: &str, mut body: Value) -> Value {
    body.as_object_mut().expect("reports are objects").insert("schema".into(), Value::String(schema_tag(kind)));
    body
}

fn parse_grid(s: &str) -> Result<Vec<Vec<usize>>> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad label dimension {x:?}"))))
                .collect()
        })
        .collect()
}

fn twist(path: &Path, rows: usize, label_dims: Option<&str>) -> Result<Value> {
    let q = read_quiver(path)?;
    let grid = match label_dims {
        Some(s) => parse_grid(s)?,
        None => vec![vec![1; rows]; rows],
    };
    let tq = build_twisted(&q, rows, &grid)?;
    let tags = |ids: Vec<String>, tags: Vec<Value>| -> Value { Value::Object(ids.into_iter().zip(tags).collect()) };
    let vertex_tags = tags(
        tq.quiver.vertices().to_vec(),
        tq.vertex_tags.iter().map(|t| tag_json(&q, serde_json::to_value(t).unwrap())).collect(),
    );
    let arrow_tags = tags(
        tq.quiver.arrows().iter().map(|a| a.id.clone()).collect(),
        tq.arrow_tags.iter().map(|t| tag_json(&q, serde_json::to_value(t).unwrap())).collect(),
    );
    Ok(tagged(
        "twisted-quiver",
        json!({
            "rows": rows,
            "label_dims": grid,
            "counts": {
                "vertices": tq.quiver.num_vertices(),
                "arrows": tq.quiver.num_arrows(),
                "i1": tq.i1.len(),
                "i2": tq.i2.len(),
            },
            "acyclic": tq.quiver.is_acyclic(),
            "quiver": quiver_value(&tq.quiver),
            "vertex_tags": vertex_tags,
            "arrow_tags": arrow_tags,
        }),
    ))
}

/// Replaces dense source indices in a tag by the source quiver's ids.
fn tag_json(q: &LabeledQuiver, mut v: Value) -> Value {
    let obj = v.as_object_mut().expect("tags are objects");
    if let Some(i) = obj.get("vertex").and_then(Value::as_u64) {
        obj.insert("vertex".into(), Value::String(q.vertices()[i as usize].clone()));
    }
    if let Some(i) = obj.get("arrow").and_then(Value::as_u64) {
        obj.insert("arrow".into(), Value::String(q.arrows()[i as usize].id.clone()));
    }
    v
}

fn expand(path: &Path) -> Result<Value> {
    let q = read_quiver(path)?;
    let exp = expand_labeled(&q);
    let copies: Map<String, Value> = q
        .arrows()
        .iter()
        .zip(&exp.copies)
        .map(|(a, c)| (a.id.clone(), json!(c.iter().map(|&k| exp.quiver.arrows()[k].id.clone()).collect::<Vec<_>>())))
        .collect();
    Ok(tagged("expanded-quiver", json!({ "quiver": quiver_value(&exp.quiver), "copies": copies })))
}

fn load_rep_theta(rt: &RepTheta) -> Result<(FiniteFieldRep, Vec<Rational>)> {
    let rep = read_rep(&rt.rep)?;
    let theta = parse_theta(&rt.theta, rep.quiver())?;
    Ok((rep, theta))
}

fn kind_str(k: StabilityKind) -> &'static str {
    match k {
        StabilityKind::Stable => "stable",
        StabilityKind::StrictlySemistable => "strictly-semistable",
        StabilityKind::Unstable => "unstable",
    }
}

fn check_rep(rt: &RepTheta, cap: u128) -> Result<Value> {
    let (rep, theta) = load_rep_theta(rt)?;
    let v = replab::is_semistable(&rep, &theta, cap)?;
    let q = rep.quiver();
    Ok(tagged(
        "verdict",
        json!({
            "dims": dims_json(q, rep.dims()),
            "theta": rationals_json(&theta),
            "relations_satisfied": true,
            "verdict": kind_str(v.kind),
            "slope": rational_json(&v.slope),
            "witness": v.witness.as_ref().map(|w| subrep_json(q, w, fp_json)),
            "witness_slope": v.witness_slope.as_ref().map(rational_json),
        }),
    ))
}

fn filtration_json(q: &LabeledQuiver, f: &Filtration) -> Value {
    let factor_dims = f.factor_dims();
    Value::Array(
        (0..f.len())
            .map(|k| {
                json!({
                    "step": subrep_json(q, &f.steps[k], fp_json),
                    "step_slope": rational_json(&f.step_slopes[k]),
                    "factor_dims": dims_json(q, &factor_dims[k]),
                    "factor_slope": rational_json(&f.factor_slopes[k]),
                })
            })
            .collect(),
    )
}

fn hn(rt: &RepTheta, cap: u128) -> Result<Value> {
    let (rep, theta) = load_rep_theta(rt)?;
    let f = replab::hn_filtration(&rep, &theta, cap)?;
    Ok(tagged(
        "hn-filtration",
        json!({
            "theta": rationals_json(&theta),
            "length": f.len(),
            "semistable": f.len() <= 1,
            "filtration": filtration_json(rep.quiver(), &f),
        }),
    ))
}

fn jh(rt: &RepTheta, cap: u128) -> Result<Value> {
    let (rep, theta) = load_rep_theta(rt)?;
    let j = replab::jh_and_gr(&rep, &theta, cap)?;
    let rep_value = |r: &FiniteFieldRep| serde_json::to_value(rep_to_file(r)).expect("rep files serialize");
    Ok(tagged(
        "jordan-holder",
        json!({
            "theta": rationals_json(&theta),
            "filtration": filtration_json(rep.quiver(), &j.filtration),
            "factors": j.factors.iter().map(rep_value).collect::<Vec<_>>(),
            "gr": rep_value(&j.gr),
        }),
    ))
}

fn s_equiv(rt: &RepTheta, other: &Path, cap: u128) -> Result<Value> {
    let (a, theta) = load_rep_theta(rt)?;
    let b = read_rep(other)?;
    if a.quiver().to_spec() != b.quiver().to_spec() || a.field() != b.field() {
        return Err(Error::ShapeMismatch("representations of different quivers or fields".into()));
    }
    let ja = replab::jh_and_gr(&a, &theta, cap)?;
    let jb = replab::jh_and_gr(&b, &theta, cap)?;
    let dims = |j: &replab::JordanHolder| Value::Array(j.factors.iter().map(|f| dims_json(a.quiver(), f.dims())).collect());
    Ok(tagged(
        "s-equivalence",
        json!({
            "theta": rationals_json(&theta),
            "s_equivalent": replab::same_factors(&ja.factors, &jb.factors)?,
            "factors": [dims(&ja), dims(&jb)],
        }),
    ))
}

/// A numerical sheaf file or a P¹ model (recognized by its `"model"` key).
fn load_sheaf(path: &Path) -> Result<NumericalQuiverSheaf> {
    let v: Value = read_json(path)?;
    if v.get("model").is_some() {
        Ok(p1_sheaf_to_numeric(&read_model(path)?))
    } else {
        parse_json::<SheafFile>(&v.to_string())?.to_sheaf()
    }
}

fn stability_pair(sigma: &str, rho: Option<&str>) -> Result<StabilityPair> {
    let s = parse_matrix(sigma)?;
    match rho {
        Some(r) => StabilityPair::new(s, parse_matrix(r)?),
        None => StabilityPair::diagonal(s),
    }
}

fn hilbert(path: &Path, sigma: &str, rho: Option<&str>) -> Result<Value> {
    let e = load_sheaf(path)?;
    let sp = stability_pair(sigma, rho)?;
    let p = sheaf::multi_hilbert(&e, sp.sigma())?;
    Ok(tagged(
        "hilbert",
        json!({
            "sigma": rational_matrix_json(sp.sigma()),
            "rho": rational_matrix_json(sp.rho()),
            "multi_hilbert": poly_json(&p),
            "multi_rank": rational_json(&sheaf::multi_rank(&e, sp.rho())?),
            "reduced": poly_json(&sheaf::reduced_poly(&e, &sp)?),
            "slope": sheaf::slope_sigma(&e, sp.sigma()).ok().map(|s| rational_json(&s)),
        }),
    ))
}

fn compare(path: &Path, sub: &Path, sigma: &str, rho: Option<&str>) -> Result<Value> {
    let e = load_sheaf(path)?;
    let f = load_sheaf(sub)?;
    let sp = stability_pair(sigma, rho)?;
    let (pe, pf) = (sheaf::reduced_poly(&e, &sp)?, sheaf::reduced_poly(&f, &sp)?);
    let ord = pf.lex_compare(&pe);
    Ok(tagged(
        "compare",
        json!({
            "reduced_ambient": poly_json(&pe),
            "reduced_sub": poly_json(&pf),
            "verdict": ordering_json(ord),
            "destabilizing": ord == Ordering::Greater,
        }),
    ))
}

fn symmetric_check(path: &Path, sigma_hat: &str) -> Result<Value> {
    let model = read_model(path)?;
    let s = parse_list(sigma_hat)?;
    let v = symmetric_semistable(&model, &s)?;
    let q = model.quiver();
    let polys: Map<String, Value> =
        q.vertices().iter().zip(&v.vertex_polys).map(|(id, p)| (id.clone(), p.as_ref().map_or(Value::Null, poly_json))).collect();
    let witness = v.witness.as_ref().map(|w| tag_json(q, serde_json::to_value(w).unwrap()));
    Ok(tagged(
        "symmetric-verdict",
        json!({
            "sigma_hat": rationals_json(&s),
            "semistable": v.semistable,
            "reduced": poly_json(&v.reduced),
            "vertex_polys": polys,
            "witness": witness,
            "witness_poly": v.witness_poly.as_ref().map(poly_json),
        }),
    ))
}

fn embedded(nm: &ModelNm) -> Result<TwistedRep> {
    embed_p1(&read_model(&nm.model)?, nm.n, nm.m)
}

fn per_vertex<T: Clone>(tr: &TwistedRep, values: &[T], enc: impl Fn(&T) -> Value) -> Value {
    Value::Object(tr.twisted.quiver.vertices().iter().cloned().zip(values.iter().map(enc)).collect())
}

fn embed(nm: &ModelNm, sigma: Option<&str>, reduce_mod: Option<u64>) -> Result<Value> {
    let tr = embedded(nm)?;
    if let Some(p) = reduce_mod {
        let reduced = tr.rep.reduce_mod_p(Fp::new(p)?)?;
        return Ok(serde_json::to_value(rep_to_file(&reduced)).expect("rep files serialize"));
    }
    let violated = tr.rep.check_relations(tr.twisted.quiver.relations())?;
    let theta = match sigma {
        Some(s) => {
            let t = theta_from_sigma(&parse_matrix(s)?, &tr.dim_vector())?;
            let flat = t.flatten(&tr.twisted);
            json!({
                "values": per_vertex(&tr, &flat, rational_json),
                "on_dimension_vector": rational_json(&t.evaluate(&tr.dim_vector())),
            })
        }
        None => Value::Null,
    };
    Ok(tagged(
        "embedded",
        json!({
            "n": nm.n,
            "m": nm.m,
            "dims": per_vertex(&tr, tr.rep.dims(), |d| json!(d)),
            "theta": theta,
            "quiver": quiver_value(&tr.twisted.quiver),
            "matrices": rational_maps_json(&tr.rep),
            "relations": {
                "checked": tr.twisted.quiver.relations().len(),
                "i1": tr.twisted.i1.len(),
                "i2": tr.twisted.i2.len(),
                "violated": violated,
            },
        }),
    ))
}

fn aux_json(s: &AuxSlope) -> Value {
    Value::String(s.to_string())
}

fn tighten(nm: &ModelNm, sigma: &str, sub: &Path) -> Result<Value> {
    let tr = embedded(nm)?;
    let sigma = parse_matrix(sigma)?;
    let input: SubRep<QQ> = subrep_from_file(&read_json(sub)?, &tr)?;
    let out = tr.tighten(&input)?;
    let q = &tr.twisted.quiver;
    let describe = |s: &SubRep<QQ>| -> Result<Value> {
        Ok(json!({
            "subrep": subrep_json(q, s, rational_json),
            "aux_slope": tr.aux_slope_of(&s.dims(), &sigma).map(|a| aux_json(&a)).unwrap_or(Value::Null),
            "degenerate": tr.is_degenerate(s, &sigma),
        }))
    };
    Ok(tagged(
        "tighten",
        json!({
            "aux_slope_ambient": aux_json(&tr.aux_slope(&sigma)?),
            "input": describe(&input)?,
            "tightened": describe(&out)?,
            "subordinate": tr.is_subordinate(&input, &out)?,
            "input_was_tight": tr.agree_on_support(&input, &out, &sigma),
        }),
    ))
}

fn sign_json(s: &[Sign]) -> Value {
    Value::Array(s.iter().map(|x| Value::String(x.symbol().into())).collect())
}

fn triviality_str(t: Triviality) -> Value {
    serde_json::to_value(t).expect("enum serializes")
}

fn chambers_json(cells: &[walls::Chamber]) -> Value {
    Value::Array(
        cells
            .iter()
            .enumerate()
            .map(|(k, c)| {
                json!({
                    "index": k,
                    "signs": sign_json(&c.signs),
                    "witness": rationals_json(&c.witness),
                    "full_dimensional": c.full_dimensional,
                    "adjacent": c.adjacent.iter().map(|(o, ws)| json!({ "chamber": o, "walls": ws })).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

/// Symmetric weights repeat `σ̂` at every vertex.
fn expand_point(x: &[Rational], space: Space, vertices: usize) -> Vec<Vec<Rational>> {
    match space {
        Space::Symmetric => vec![x.to_vec(); vertices],
        Space::Full => {
            let n = x.len() / vertices;
            x.chunks(n).map(<[Rational]>::to_vec).collect()
        }
    }
}

fn walls_report(family: &Path, cone: Option<&Path>, space: SpaceArg, lower_dim: bool) -> Result<Value> {
    let fam = read_family(family)?;
    let first = fam.first().ok_or_else(|| Error::InvalidParameter("the family is empty".into()))?;
    let (nv, nb) = (first.ambient.num_vertices(), first.ambient.num_bundles());
    let space = match space {
        SpaceArg::Symmetric => Space::Symmetric,
        SpaceArg::Full => Space::Full,
    };
    let dim = if space == Space::Symmetric { nb } else { nv * nb };
    let cone = match cone {
        Some(p) => read_cone(p)?,
        None => Cone::orthant(dim),
    };
    if cone.dim() != dim {
        return Err(Error::ShapeMismatch(format!("the cone must have dimension {dim}")));
    }
    let mut forms: Vec<(usize, WallForm)> = Vec::new();
    for (k, pair) in fam.iter().enumerate() {
        for e in 0..pair.ambient.dim() {
            forms.push((k, walls::wall_form(&pair.ambient, &pair.sub, e, &format!("{}:e{e}", pair.label), space, &cone)?));
        }
    }
    let mut distinct: BTreeSet<Vec<Rational>> = BTreeSet::new();
    let entries: Vec<Value> = forms
        .iter()
        .map(|(k, w)| {
            let poly = w.polynomial();
            let (linear, quadratic) = match &poly {
                WallPolynomial::Linear(l) => (Some(rationals_json(l)), rational_matrix_json(&restricted(w))),
                WallPolynomial::Quadratic(q) => (None, rational_matrix_json(q)),
            };
            if !poly.is_zero() {
                distinct.insert(normalized(&poly));
            }
            json!({
                "label": w.label,
                "pair": fam[*k].label,
                "e": w.e,
                "quadratic_full": rational_matrix_json(&w.quadratic),
                "linear_per_vertex": w.linear.as_ref().map(|l| rationals_json(l)),
                "quadratic": quadratic,
                "linear": linear,
                "triviality": triviality_str(w.triviality()),
                "certified": w.classification.certified,
                "sign_on_cone": w.classification.sign.map(|s| s.symbol()),
            })
        })
        .collect();

    let genuine: Vec<&WallForm> = forms.iter().map(|(_, w)| w).filter(|w| w.is_genuine()).collect();
    let linear: Option<Vec<Vec<Rational>>> = genuine
        .iter()
        .map(|w| match w.polynomial() {
            WallPolynomial::Linear(l) => Some(l),
            WallPolynomial::Quadratic(_) => None,
        })
        .collect();
    let (chambers, flip_table, note) = match linear {
        Some(ls) => {
            let cells = walls::enumerate_chambers(&ls, &cone, lower_dim)?;
            let mut rows = Vec::new();
            for (c, cell) in cells.iter().enumerate() {
                let sigma = expand_point(&cell.witness, space, nv);
                let mut verdicts = Map::new();
                for pair in &fam {
                    verdicts.insert(pair.label.clone(), ordering_json(walls::compare_at(pair, &sigma)?));
                }
                rows.push(json!({ "chamber": c, "verdicts": verdicts }));
            }
            let mut flips = Vec::new();
            for (c, cell) in cells.iter().enumerate() {
                for (o, crossed) in &cell.adjacent {
                    if c < *o {
                        let changed: Vec<&String> = fam
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| rows[c]["verdicts"][&fam[*k].label] != rows[*o]["verdicts"][&fam[*k].label])
                            .map(|(_, p)| &p.label)
                            .collect();
                        let names: Vec<&String> = crossed.iter().map(|&i| &genuine[i].label).collect();
                        flips.push(json!({ "chambers": [c, o], "walls": names, "flipped": changed }));
                    }
                }
            }
            (chambers_json(&cells), json!({ "verdicts": rows, "across_walls": flips }), Value::Null)
        }
        None => (Value::Null, Value::Null, json!("some genuine wall is quadratic; chambers are enumerated for linear walls only")),
    };
    Ok(tagged(
        "walls-report",
        json!({
            "space": serde_json::to_value(space).unwrap(),
            "cone": cone_json(&cone),
            "walls": entries,
            "distinct_forms": distinct.len(),
            "pairs": fam.len(),
            "genuine_walls": genuine.iter().map(|w| &w.label).collect::<Vec<_>>(),
            "chambers": chambers,
            "flip_table": flip_table,
            "note": note,
        }),
    ))
}

fn restricted(w: &WallForm) -> Vec<Vec<Rational>> {
    walls::restrict_symmetric(&w.quadratic, w.vertices, w.bundles)
}

/// A wall equation up to a positive scalar.
fn normalized(p: &WallPolynomial) -> Vec<Rational> {
    match p {
        WallPolynomial::Linear(l) => primitive_ray(l),
        WallPolynomial::Quadratic(q) => {
            let mut flat: Vec<Rational> = q.iter().flatten().cloned().collect();
            flat = primitive_ray(&flat);
            flat.insert(0, Rational::from_integer(2.into()));
            flat
        }
    }
}

fn cone_json(c: &Cone) -> Value {
    json!({
        "dim": c.dim(),
        "inequalities": rational_matrix_json(c.inequalities()),
        "separated_from_boundary": c.separated_from_boundary(),
    })
}

fn chambers(walls_path: &Path, cone_path: &Path, lower_dim: bool) -> Result<Value> {
    let ws = read_walls(walls_path)?;
    let cone = read_cone(cone_path)?;
    let mut used = Vec::new();
    let mut dropped = Vec::new();
    for (k, (label, w)) in ws.iter().enumerate() {
        let l = match w {
            WallPolynomial::Linear(l) => l,
            WallPolynomial::Quadratic(_) => return Err(Error::NonLinearWall(k)),
        };
        let c = walls::classify(w, &cone)?;
        if c.triviality == Triviality::Genuine {
            used.push((label.clone(), l.clone()));
        } else {
            dropped.push(json!({ "label": label, "triviality": triviality_str(c.triviality) }));
        }
    }
    let forms: Vec<Vec<Rational>> = used.iter().map(|(_, l)| l.clone()).collect();
    let cells = walls::enumerate_chambers(&forms, &cone, lower_dim)?;
    Ok(tagged(
        "chambers",
        json!({
            "cone": cone_json(&cone),
            "walls": used.iter().map(|(l, _)| l).collect::<Vec<_>>(),
            "dropped": dropped,
            "full_dimensional": cells.iter().filter(|c| c.full_dimensional).count(),
            "chambers": chambers_json(&cells),
        }),
    ))
}

fn compare_across(family: &Path, sigma: &str, sigma_prime: &str) -> Result<Value> {
    let fam: Vec<FamilyPair> = read_family(family)?;
    let (s, t) = (parse_matrix(sigma)?, parse_matrix(sigma_prime)?);
    let r = walls::compare_across(&s, &t, &fam)?;
    Ok(tagged(
        "compare-across",
        json!({
            "sigma": rational_matrix_json(&s),
            "sigma_prime": rational_matrix_json(&t),
            "rows": r.rows.iter().map(|row| json!({
                "label": row.label,
                "at_sigma": ordering_json(row.at_sigma),
                "at_sigma_prime": ordering_json(row.at_sigma_prime),
                "flipped": row.flipped,
            })).collect::<Vec<_>>(),
            "signs_sigma": sign_json(&r.signs_sigma),
            "signs_sigma_prime": sign_json(&r.signs_sigma_prime),
            "same_sign_vector": r.same_sign_vector,
            "flips": r.flips(),
        }),
    ))
}

fn plot_section(walls_path: &Path, cone_path: &Path, u: &str, v: &str, samples: usize, precision: usize) -> Result<String> {
    let ws = read_walls(walls_path)?;
    let cone = read_cone(cone_path)?;
    let traces = walls::section_traces(&ws, &parse_list(u)?, &parse_list(v)?, &cone, precision as u32)?;
    Ok(walls::traces_to_csv(&traces, samples, precision))
}
