use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel).display().to_string()
}

fn cslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cslab")).args(args).env_remove("CSLAB_TOL").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

#[test]
fn carrier_check_accepts_every_shipped_semigroup() {
    for name in ["trivial", "mul2", "null2", "left-zero2", "z2", "z3", "z5", "rat-add2", "nonneg"] {
        let out = cslab(&["carrier", "check", "--carrier", &data(&format!("carriers/{name}.json")), "--json"]);
        assert_eq!(code(&out), 0, "{name}: {}", stderr(&out));
        let v = json(&out);
        assert_eq!(v["schema"], "cslab/1");
        assert_eq!(v["valid"], true);
    }
    let null = json(&cslab(&["carrier", "check", "--carrier", &data("carriers/null2.json"), "--json"]));
    assert_eq!(null["square_generated"], false);
}

#[test]
fn carrier_check_rejects_a_non_associative_table() {
    let out = cslab(&["carrier", "check", "--carrier", &data("carriers/nonassoc.json")]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("not associative"), "{}", stderr(&out));
}

#[test]
fn chars_and_additive() {
    let v = json(&cslab(&["chars", "--carrier", &data("carriers/z3.json"), "--json"]));
    assert_eq!(v["count"], 4);
    let v = json(&cslab(&["chars", "--carrier", &data("carriers/rat-add2.json"), "--json"]));
    assert_eq!(v["exhaustive"], false);
    for name in ["z3", "z5"] {
        let v = json(&cslab(&["additive", "--carrier", &data(&format!("carriers/{name}.json")), "--json"]));
        assert_eq!(v["dimension"], 0, "{name}");
    }
    let v = json(&cslab(&["additive", "--carrier", &data("carriers/rat-add2.json"), "--json"]));
    assert_eq!(v["dimension"], 2);
    let out = cslab(&["additive", "--carrier", &data("carriers/mul2.json"), "--domain", "1", "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["domain"], serde_json::json!(["1"]));
    let out = cslab(&["additive", "--carrier", &data("carriers/z3.json"), "--domain", "7"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn gen_writes_a_verifiable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("t16.json");
    let report = dir.path().join("report.json");
    let out = cslab(&[
        "gen",
        "--family",
        "t1.6",
        "--carrier",
        &data("carriers/rat-add2.json"),
        "--seed",
        "42",
        "--lambda2",
        "1",
        "--instance",
        inst.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(rep["runs"][0]["verification"]["relative"].as_f64().unwrap() <= 1e-9);
    let out = cslab(&["verify", "--solution", inst.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = cslab(&["classify", "--solution", inst.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("\"t1.6\""));
}

#[test]
fn gen_both_modes_shows_the_printed_failure() {
    let out =
        cslab(&["gen", "--family", "t1.3", "--carrier", &data("carriers/rat-add2.json"), "--mode", "both", "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    assert_eq!(runs[0]["mode"], "as-printed");
    assert_eq!(runs[0]["passes"], false);
    assert_eq!(runs[1]["passes"], true);
}

#[test]
fn gen_as_printed_failure_exits_one() {
    let out = cslab(&["gen", "--family", "t2.1", "--carrier", &data("carriers/rat-add2.json"), "--mode", "as-printed"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let out = cslab(&[
            "gen",
            "--family",
            "t2.5.iii",
            "--carrier",
            &data("carriers/nonneg.json"),
            "--seed",
            "7",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn verify_shipped_solutions() {
    for name in ["t1.1-rat-add2", "t1.6-rat-add2", "t2.3-rat-add2", "t2.5.ii-rat-add2"] {
        let out = cslab(&["verify", "--solution", &data(&format!("solutions/{name}.json"))]);
        assert_eq!(code(&out), 0, "{name}: {}", stderr(&out));
    }
    let out = cslab(&["verify", "--solution", &data("solutions/broken-mul2.json")]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("exceeds"));
}

#[test]
fn zero_quadruple_violates_independence() {
    let out = cslab(&["verify", "--solution", &data("solutions/zero-z3.json"), "--lambda1", "0", "--lambda2", "1"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("independence hypothesis violated"), "{}", stderr(&out));
    let out = cslab(&["classify", "--solution", &data("solutions/zero-z3.json")]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("independence hypothesis violated"));
}

#[test]
fn solution_without_carrier_needs_the_flag() {
    let sol = data("solutions/dependent-z3.json");
    assert_eq!(code(&cslab(&["verify", "--solution", &sol])), 2);
    let out = cslab(&["verify", "--solution", &sol, "--carrier", &data("carriers/z3.json")]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("independence"));
}

#[test]
fn complex_lambdas_and_tolerance_override() {
    let inst = data("solutions/t2.3-rat-add2.json");
    let out = cslab(&["verify", "--solution", &inst, "--lambda1", "[0.9,0.2]", "--lambda2", "[1.1,-0.3]"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = cslab(&["verify", "--solution", &inst, "--lambda1", "[0.5,0.2]"]);
    assert_eq!(code(&out), 1);
    let out = Command::new(env!("CARGO_BIN_EXE_cslab"))
        .args(["verify", "--solution", &inst])
        .env("CSLAB_TOL", "1e-20")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1, "a 1e-20 tolerance is below rounding error");
    assert_eq!(code(&cslab(&["verify", "--solution", &inst, "--lambda1", "abc"])), 2);
}

#[test]
fn classify_reports_the_t25_variants() {
    let out = cslab(&["classify", "--solution", &data("solutions/t2.5.ii-rat-add2.json"), "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let ids: Vec<&str> = v["matches"].as_array().unwrap().iter().filter_map(|m| m["family"].as_str()).collect();
    assert!(ids.contains(&"t2.5.ii"), "{ids:?}");
}

#[test]
fn oracle_suites() {
    for suite in ["lemma31", "lemma32", "prop33", "prop34"] {
        let out = cslab(&["oracle", "--suite", suite, "--draws", "500", "--json"]);
        assert_eq!(code(&out), 0, "{suite}: {}", stderr(&out));
        assert_eq!(json(&out)["clean"], true);
    }
    let out = cslab(&["oracle", "--draws", "200"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("0 counterexamples"));
    assert_eq!(code(&cslab(&["oracle", "--suite", "lemma99"])), 2);
}

#[test]
fn catalog_lists_every_template() {
    let v = json(&cslab(&["catalog", "--json"]));
    assert_eq!(v["templates"].as_array().unwrap().len(), 24);
}

#[test]
fn adjudicate_single_and_all() {
    let out = cslab(&["adjudicate", "--family", "t2.1", "--seeds", "5", "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let adj = &v["adjudications"][0];
    assert_eq!(adj["verdict"], "corrected");
    assert!(adj["as_printed"]["max_relative"].as_f64().unwrap() > 1e-3);
    assert!(adj["corrected"]["max_relative"].as_f64().unwrap() <= 1e-9);

    let out = cslab(&["adjudicate", "--all", "--seeds", "3", "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["adjudications"].as_array().unwrap().len(), 24);
    for key in ["t1.3", "t2.1", "t2.2", "t2.4"] {
        let a = v["adjudications"].as_array().unwrap().iter().find(|a| a["family"] == key).unwrap();
        assert_eq!(a["verdict"], "corrected", "{key}");
    }
    assert_eq!(code(&cslab(&["adjudicate"])), 2);
    assert_eq!(code(&cslab(&["adjudicate", "--family", "t9.9"])), 2);
}

#[test]
fn io_errors_name_the_file_and_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"kind\": \"finite\",\n  oops\n}\n").unwrap();
    let out = cslab(&["carrier", "check", "--carrier", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("bad.json:3:"), "{err}");

    let missing = Path::new("/nonexistent/carrier.json");
    let out = cslab(&["chars", "--carrier", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("/nonexistent/carrier.json"));

    let out = cslab(&["catalog", "--out", "/nonexistent/dir/report.json"]);
    assert_eq!(code(&out), 2);
}
