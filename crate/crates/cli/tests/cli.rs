use std::path::PathBuf;
use std::process::{Command, Output};

use jsonschema::{Draft, JSONSchema};
use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn data(name: &str) -> String {
    root().join("data").join(name).to_string_lossy().into_owned()
}

fn qsl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsl")).args(args).output().expect("binary runs")
}

fn schema_for(kind: &str) -> JSONSchema {
    let path = root().join("schemas/v1").join(format!("{kind}.schema.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
    let schema: Value = serde_json::from_str(&text).unwrap();
    JSONSchema::options().with_draft(Draft::Draft202012).compile(&schema).expect("schema compiles")
}

fn validate(kind: &str, v: &Value) {
    let schema = schema_for(kind);
    let msgs: Vec<String> = match schema.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{kind} report does not validate: {msgs:#?}\n{v:#}");
}

/// Runs twice, checks the outputs are byte-identical, validates the report
/// against the schema named by its own tag and returns it.
fn report(args: &[&str]) -> Value {
    let a = qsl(args);
    assert!(a.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&a.stdout));
    let b = qsl(args);
    assert_eq!(a.stdout, b.stdout, "non-deterministic output for {args:?}");
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let tag = v["schema"].as_str().expect("reports carry a schema tag");
    let kind = tag.strip_prefix("qsl/").and_then(|t| t.strip_suffix("/v1")).unwrap();
    validate(kind, &v);
    v
}

fn error(args: &[&str], env: Option<(&str, &str)>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qsl"));
    cmd.args(args);
    if let Some((k, v)) = env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).expect("errors are JSON");
    validate("error", &v);
    (out.status.code().unwrap(), v["error"]["code"].as_str().unwrap().to_string())
}

#[test]
fn input_files_validate() {
    for (file, kind) in [
        ("a2.json", "quiver"),
        ("a2_identity_f2.json", "rep"),
        ("a2_zero_f2.json", "rep"),
        ("a2_model.json", "p1-model"),
        ("split_e.json", "sheaf"),
        ("quadrant.json", "cone"),
        ("synthetic_family.json", "family"),
        ("single_wall.json", "walls"),
        ("quadratic_wall.json", "walls"),
        ("summand_2.json", "subrep"),
    ] {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(data(file)).unwrap()).unwrap();
        validate(kind, &v);
    }
}

#[test]
fn twist_a2_doubled() {
    let v = report(&["twist", "--quiver", &data("a2.json"), "--rows", "2"]);
    assert_eq!(v["counts"]["vertices"], 8);
    assert_eq!(v["counts"]["arrows"], 12);
    assert_eq!(v["counts"]["i1"], 4);
    // the emitted quiver is itself a valid quiver file
    validate("quiver", &v["quiver"]);
}

#[test]
fn expand_keeps_unlabeled_arrows() {
    let v = report(&["expand", "--quiver", &data("a2.json")]);
    assert_eq!(v["copies"]["a"], serde_json::json!(["a"]));
}

#[test]
fn rep_lab_commands() {
    let v = report(&["check-rep", "--rep", &data("a2_identity_f2.json"), "--theta", "1,-1"]);
    assert_eq!(v["verdict"], "stable");
    let v = report(&["check-rep", "--rep", &data("a2_zero_f2.json"), "--theta", "1,-1"]);
    assert_eq!(v["verdict"], "unstable");
    assert_eq!(v["witness"]["dims"], serde_json::json!({"1": 1, "2": 0}));

    let v = report(&["hn", "--rep", &data("a2_zero_f2.json"), "--theta", "1,-1"]);
    assert_eq!(v["length"], 2);
    assert_eq!(v["filtration"][0]["factor_slope"], "1");
    assert_eq!(v["filtration"][1]["factor_slope"], "-1");

    let v = report(&["jh", "--rep", &data("a2_identity_f2.json"), "--theta", "0,0"]);
    assert_eq!(v["factors"].as_array().unwrap().len(), 2);
    let v = report(&["s-equiv", "--rep", &data("a2_identity_f2.json"), "--theta", "0,0", "--other", &data("a2_zero_f2.json")]);
    assert_eq!(v["s_equivalent"], true);
}

#[test]
fn sheaf_commands() {
    let v = report(&["hilbert", "--sheaf", &data("split_e.json"), "--sigma", "1,1"]);
    assert_eq!(v["multi_hilbert"]["display"], "6T + 8");
    let v = report(&["compare", "--sheaf", &data("split_e.json"), "--sub", &data("split_f.json"), "--sigma", "1,1"]);
    assert_eq!(v["verdict"], "greater");
    assert_eq!(v["destabilizing"], true);
    let v = report(&["symmetric-check", "--model", &data("a2_model.json"), "--sigma-hat", "1,1"]);
    assert_eq!(v["semistable"], false);
    let v = report(&["hilbert", "--sheaf", &data("a2_model.json"), "--sigma", "1,1;1,1"]);
    assert_eq!(v["reduced"]["display"], "T + 1");
}

#[test]
fn embedding_commands() {
    let v = report(&["embed", "--model", &data("a2_model.json"), "--n", "1", "--m", "2", "--sigma", "1,1;1,1"]);
    assert_eq!(v["theta"]["on_dimension_vector"], "0");
    assert_eq!(v["relations"]["violated"], Value::Null);

    let out = qsl(&["embed", "--model", &data("a2_model.json"), "--n", "1", "--m", "2", "--reduce-mod", "3"]);
    assert!(out.status.success());
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    validate("rep", &rep);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rep.json");
    std::fs::write(&path, &out.stdout).unwrap();
    // the reduced dump loads as a rep; a cap of 1 stops before enumerating
    let (code, e) = error(&["check-rep", "--rep", path.to_str().unwrap(), "--theta", "0,0,0,0,0,0,0,0"], Some(("QSL_CAP", "1")));
    assert_eq!((code, e.as_str()), (1, "E_INSTANCE_TOO_LARGE"));

    let v = report(&[
        "tighten", "--model", &data("a2_model.json"), "--n", "1", "--m", "2", "--sigma", "1,1;1,1", "--sub", &data("summand_2.json"),
    ]);
    assert_eq!(v["subordinate"], true);
}

#[test]
fn wall_commands() {
    let v = report(&["chambers", "--walls", &data("single_wall.json"), "--cone", &data("quadrant.json")]);
    let mut w: Vec<String> = v["chambers"].as_array().unwrap().iter().map(|c| c["witness"].to_string()).collect();
    w.sort();
    assert_eq!(w, vec![r#"["1","2"]"#, r#"["2","1"]"#]);
    let v = report(&["chambers", "--walls", &data("two_walls.json"), "--cone", &data("quadrant.json")]);
    assert_eq!(v["full_dimensional"], 3);
    let v = report(&["chambers", "--walls", &data("no_walls.json"), "--cone", &data("quadrant.json")]);
    assert_eq!(v["full_dimensional"], 1);

    let v = report(&["walls", "--family", &data("synthetic_family.json")]);
    assert_eq!(v["genuine_walls"], serde_json::json!(["F:e1"]));
    assert_eq!(v["chambers"].as_array().unwrap().len(), 2);
    assert_eq!(v["flip_table"]["across_walls"][0]["flipped"], serde_json::json!(["F"]));
    // the walls report feeds back into chambers
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("walls.json");
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    let c = report(&["chambers", "--walls", path.to_str().unwrap(), "--cone", &data("quadrant.json")]);
    assert_eq!(c["walls"], serde_json::json!(["F:e1"]));
    assert_eq!(c["dropped"].as_array().unwrap().len(), 1);

    let v = report(&["walls", "--family", &data("synthetic_family.json"), "--space", "full"]);
    assert_eq!(v["walls"][1]["triviality"], "genuine");

    let v = report(&["compare-across", "--family", &data("synthetic_family.json"), "--sigma", "2,1", "--sigma-prime", "1,2"]);
    assert_eq!(v["flips"], 1);
    let v = report(&["compare-across", "--family", &data("synthetic_family.json"), "--sigma", "2,1", "--sigma-prime", "2,1"]);
    assert_eq!(v["flips"], 0);
}

#[test]
fn plot_sections() {
    let run = |walls: &str| {
        let out = qsl(&["plot-section", "--walls", &data(walls), "--cone", &data("quadrant.json"), "--u", "1,0", "--v", "0,1", "--samples", "2", "--precision", "2"]);
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let diag = "wall,x,y\n{},0.00,0.00\n{},0.50,0.50\n{},1.00,1.00\n";
    assert_eq!(run("single_wall.json"), diag.replace("{}", "w"));
    assert_eq!(run("quadratic_wall.json"), diag.replace("{}", "q"));
    assert_eq!(run("no_walls.json"), "wall,x,y\n");
    let (code, e) = error(
        &["plot-section", "--walls", &data("single_wall.json"), "--cone", &data("quadrant.json"), "--u", "-1,0", "--v", "0,1"],
        None,
    );
    assert_eq!((code, e.as_str()), (1, "E_OUTSIDE_CONE"));
}

#[test]
fn exit_codes() {
    assert_eq!(error(&["check-rep", "--rep", "/nonexistent.json", "--theta", "1"], None), (2, "E_PARSE".into()));
    assert_eq!(error(&["frobnicate"], None).0, 2);
    assert_eq!(
        error(&["check-rep", "--rep", &data("a2_identity_f2.json"), "--theta", "1,-1"], Some(("QSL_CAP", "1"))),
        (1, "E_INSTANCE_TOO_LARGE".into())
    );
    assert_eq!(error(&["check-rep", "--rep", &data("a2_identity_f2.json"), "--theta", "1"], None), (2, "E_SHAPE_MISMATCH".into()));
    assert_eq!(error(&["jh", "--rep", &data("a2_zero_f2.json"), "--theta", "1,-1"], None), (1, "E_NOT_SEMISTABLE".into()));
    assert_eq!(
        error(&["chambers", "--walls", &data("quadratic_wall.json"), "--cone", &data("quadrant.json")], None),
        (1, "E_NON_LINEAR_WALL".into())
    );
    assert_eq!(error(&["embed", "--model", &data("a2_model.json"), "--n", "2", "--m", "1"], None).0, 1);
}

#[test]
fn out_flag_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = qsl(&["--jobs", "2", "check-rep", "--rep", &data("a2_identity_f2.json"), "--theta", "1,-1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    validate("verdict", &v);
}
