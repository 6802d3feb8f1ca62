use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qmform_core::form::{rat, ratio};
use qmform_core::AltForm;
use serde_json::Value;
use tempfile::TempDir;

fn qmform(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qmform"));
    cmd.args(args);
    match workers {
        Some(w) => cmd.env("QMFORM_WORKERS", w),
        None => cmd.env_remove("QMFORM_WORKERS"),
    };
    cmd.output().unwrap()
}

fn run_ok(args: &[&str]) -> Value {
    let out = qmform(args, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn body(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("manifest").unwrap();
    v
}

fn form_of(v: &Value) -> AltForm {
    let rows: Vec<Vec<String>> = serde_json::from_value(v["form"].clone()).unwrap();
    let rows: Vec<Vec<_>> = rows.iter().map(|r| r.iter().map(|x| x.parse().unwrap()).collect()).collect();
    AltForm::from_rows(rows).unwrap()
}

const NOISY: &str = r#"{"rank":2,"core":[["0","1/2"],["-1/2","0"]],
  "brooks":[{"pattern":"a b","weight":"1"}],"defect_bound":"127/32"}"#;

const GENUS_TWO: &str = r#"{"kind":"product_of_surfaces","surfaces":[{"genus":2,"area":"1"}]}"#;

#[test]
fn pure_core_extract_is_exact() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "s.json", r#"{"rank":3,"core":[["0","2","-1/3"],["-2","0",5],["1/3","-5","0"]]}"#);
    let v = run_ok(&["extract", "--spec", s(&spec), "--reps", "a;a b A;c", "--kmax", "16"]);
    let expected = AltForm::from_rows(vec![
        vec![rat(0), rat(2), ratio(-1, 3)],
        vec![rat(-2), rat(0), rat(5)],
        vec![ratio(1, 3), rat(-5), rat(0)],
    ])
    .unwrap();
    assert_eq!(form_of(&v), expected);
    assert_eq!(v["envelope_constant"], "0");
    assert_eq!(v["pairs"].as_array().unwrap().len(), 3);
    assert_eq!(v["manifest"]["command"], "extract");
    assert_eq!(v["manifest"]["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn zero_spec_gives_zero_form() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "z.json", r#"{"rank":4,"core":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#);
    let v = run_ok(&["extract", "--spec", s(&spec), "--kmax", "4"]);
    assert!(form_of(&v).is_zero());
}

#[test]
fn noisy_extract_csv_and_envelope() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "n.json", NOISY);
    let csv = dir.path().join("o.csv");
    let out = dir.path().join("o.json");
    let out_run = qmform(
        &["extract", "--spec", s(&spec), "--kmax", "64", "--csv", s(&csv), "--out", s(&out)],
        None,
    );
    assert!(out_run.status.success());
    assert!(out_run.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let pair = &v["pairs"][0];
    // core 1/2 plus the Brooks part (k + 1) / k - 1
    assert_eq!(pair["final_estimate"], "33/64");
    assert_eq!(v["defect_bound"], "127/32");
    let table = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "i,j,k,estimate,envelope");
    assert_eq!(lines.len(), 8);
    assert!(lines[1].starts_with("1,2,1,3/2,"));
    assert_eq!(v["manifest"]["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn output_is_deterministic_across_workers() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "d.json",
        r#"{"rank":3,"core":[["0","1","2"],["-1","0","3"],["-2","-3","0"]],
            "brooks":[{"pattern":"a c","weight":"2"},{"pattern":"b B a","weight":"-1/2"}],
            "homog_depth":16,"defect_bound":"10"}"#,
    );
    let args = ["extract", "--spec", s(&spec), "--kmax", "32"];
    let one = qmform(&args, Some("1"));
    let three = qmform(&args, Some("3"));
    let again = qmform(&args, Some("1"));
    let parse = |o: &Output| -> Value { serde_json::from_slice(&o.stdout).unwrap() };
    assert_eq!(parse(&three)["manifest"]["workers"], 3);
    assert_eq!(body(parse(&one)), body(parse(&three)));
    assert_eq!(body(parse(&one)), body(parse(&again)));
}

#[test]
fn default_defect_bound_is_computed() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "s.json", r#"{"rank":2,"core":[["0","1"],["-1","0"]],"brooks":[{"pattern":"a b","weight":"1"}]}"#);
    let v = run_ok(&["extract", "--spec", s(&spec), "--kmax", "2"]);
    assert_eq!(v["defect_bound"], "127/32");
    let capped = qmform(&["extract", "--spec", s(&spec), "--ball-cap", "10"], None);
    assert_eq!(capped.status.code(), Some(3));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{bad");
    assert_eq!(qmform(&["extract", "--spec", s(&bad)], None).status.code(), Some(2));
    let unknown = write(&dir, "u.json", r#"{"rank":2,"core":[[0,1],[-1,0]],"extra":1}"#);
    assert_eq!(qmform(&["extract", "--spec", s(&unknown)], None).status.code(), Some(2));
    let sym = write(&dir, "sym.json", r#"{"rank":2,"core":[[0,1],[1,0]]}"#);
    assert_eq!(qmform(&["extract", "--spec", s(&sym)], None).status.code(), Some(2));
    let missing = dir.path().join("nope.json");
    assert_eq!(qmform(&["extract", "--spec", s(&missing)], None).status.code(), Some(2));
    let spec = write(&dir, "n.json", NOISY);
    let big = qmform(&["extract", "--spec", s(&spec), "--max-letters", "100"], None);
    assert_eq!(big.status.code(), Some(3));
    let reps = qmform(&["extract", "--spec", s(&spec), "--reps", "a;a b"], None);
    assert_eq!(reps.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&reps.stderr).starts_with("error:"));
}

#[test]
fn predict_examples() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "g2.json", GENUS_TWO);
    let v = run_ok(&["predict", "--manifold", s(&m)]);
    let j = AltForm::standard_symplectic().scaled(&rat(-2));
    assert_eq!(form_of(&v), AltForm::block_diag(&[j.clone(), j]));
    assert_eq!(v["scalar_curvature"], "-2");
    assert_eq!(v["known_dim"], 4);

    let tori = write(
        &dir,
        "t.json",
        r#"{"kind":"product_of_surfaces","surfaces":[{"genus":1,"area":"2"},{"genus":1,"area":"3"}]}"#,
    );
    let v = run_ok(&["predict", "--manifold", s(&tori)]);
    assert!(form_of(&v).is_zero());
    assert_eq!(v["warnings"].as_array().unwrap().len(), 2);

    let blowup = write(&dir, "b.json", r#"{"kind":"torus_blowup","blowup":{"radii":[1,2],"rho":"1/4","r":"1/2"}}"#);
    assert_eq!(qmform(&["predict", "--manifold", s(&blowup)], None).status.code(), Some(2));
    let blowup = write(
        &dir,
        "b2.json",
        r#"{"kind":"torus_blowup","blowup":{"radii":[1,2],"rho":"1/4","r":"1/2","curvature_A":"-1"}}"#,
    );
    let v = run_ok(&["predict", "--manifold", s(&blowup)]);
    let jj = AltForm::standard_symplectic();
    assert_eq!(form_of(&v), AltForm::block_diag(&[jj.scaled(&rat(-32)), jj.scaled(&rat(-8))]));
}

#[test]
fn surface_times_manifold_reports_unknown() {
    let dir = TempDir::new().unwrap();
    let m = write(
        &dir,
        "sm.json",
        r#"{"kind":"surface_times_manifold","surfaces":[{"genus":2,"area":"1"}],
            "extra_volume":"2","extra_curvature":"1","extra_half_dim":1,"extra_betti1":2}"#,
    );
    let v = run_ok(&["predict", "--manifold", s(&m)]);
    assert_eq!(v["known_dim"], 4);
    assert_eq!(v["form"][0][5], "UNKNOWN");
    // n Vol(N) Area(S) (2 - 2l) / Area(S)^2 = 2 * 2 * -2
    assert_eq!(v["form"][0][1], "-8");
    let r = qmform(&["decide", "extendable", "--manifold", s(&m), "--basis", "1,0,0,0,0,0"], None);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn decisions() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "g2.json", GENUS_TWO);
    let v = run_ok(&["decide", "extendable", "--manifold", s(&m), "--basis", "1,0,0,0;0,0,1,0"]);
    assert_eq!(v["verdict"], "extendable");
    let v = run_ok(&["decide", "extendable", "--manifold", s(&m), "--basis", "1,0,0,0;0,1,0,0"]);
    assert_eq!(v["verdict"], "not_extendable");
    assert_eq!(v["witness"]["value"], "-2");

    let v = run_ok(&["decide", "reznikov", "--manifold", s(&m), "--basis", "1,0,0,0", "--ic1", "nonzero"]);
    assert_eq!(v["verdict"], "nontrivial");
    assert_eq!(v["failing_conditions"], serde_json::json!(["condition_1_ic1_nonzero"]));
    let v = run_ok(&["decide", "reznikov", "--manifold", s(&m), "--basis", "1,0,0,0;0,0,1,0", "--ic1", "zero"]);
    assert_eq!(v["verdict"], "trivial");

    let v = run_ok(&["decide", "commute", "--manifold", s(&m), "--v", "1,0,0,0", "--w", "1,0,0,0"]);
    assert_eq!((v["universal_cover"].as_str(), v["base"].as_str()), (Some("not_obstructed"), Some("not_obstructed")));
    let v = run_ok(&["decide", "commute", "--manifold", s(&m), "--v", "1,0,0,0", "--w", "0,1,0,0", "--ic1", "cyclic:-2"]);
    assert_eq!(v["value"], "-2");
    assert_eq!((v["universal_cover"].as_str(), v["base"].as_str()), (Some("obstructed"), Some("not_obstructed")));
    let bad = qmform(&["decide", "commute", "--manifold", s(&m), "--v", "1,0", "--w", "0,1,0,0"], None);
    assert_eq!(bad.status.code(), Some(2));
    let bad = qmform(&["decide", "commute", "--manifold", s(&m), "--v", "1,0,0,0", "--w", "0,1,0,0", "--ic1", "cyclic:0"], None);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn extracted_form_feeds_decide() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "s.json", r#"{"rank":2,"core":[["0","3"],["-3","0"]]}"#);
    let out = dir.path().join("e.json");
    assert!(qmform(&["extract", "--spec", s(&spec), "--kmax", "2", "--out", s(&out)], None).status.success());
    let v = run_ok(&["decide", "commute", "--form", s(&out), "--v", "1,0", "--w", "0,1"]);
    assert_eq!(v["value"], "3");
    let bare = write(&dir, "f.json", r#"[["0","1/2"],["-1/2","0"]]"#);
    let v = run_ok(&["decide", "extendable", "--form", s(&bare), "--basis", "1,1"]);
    assert_eq!(v["verdict"], "extendable");
}

#[test]
fn defect_command() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "n.json", NOISY);
    let v = run_ok(&["defect", "--spec", s(&spec), "--radius", "6"]);
    assert_eq!(v["lower_bound"], "127/64");
    let a = body(run_ok(&["defect", "--spec", s(&spec), "--radius", "6", "--samples", "500", "--seed", "4"]));
    let b = body(run_ok(&["defect", "--spec", s(&spec), "--radius", "6", "--samples", "500", "--seed", "4"]));
    assert_eq!(a, b);
}

#[test]
fn selftest_passes() {
    let out = qmform(&["selftest", "--trials", "50"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
