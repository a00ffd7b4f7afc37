use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SQRT2_LOAD: &str = r#"{"basis":["1","sqrt2"],"enclosures":{"sqrt2":{"cf":[1],"period":[2]}},
    "graph":{"vertices":[{"id":0,"weight":-2}],"edges":[]},"nefloads":{"0":[0,"1/2"]}}"#;

// branch 2 sqrt2 - 19/10 on a single -2 curve
const BARELY_LC: &str = r#"{"basis":["1","sqrt2"],"enclosures":{"sqrt2":{"cf":[1],"period":[2]}},
    "graph":{"vertices":[{"id":0,"weight":-2}],"edges":[]},
    "branches":[{"vertex":0,"coeff":["-19/10",2]}]}"#;

fn gmld(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmld"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn gen_hj_round_trips_through_mld() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("hj.json");
    let o = gmld(&["gen-hj", "7", "3", "--out", arg(&model)]);
    assert!(o.status.success());
    let o = gmld(&["mld", arg(&model)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    // 7/3 = [3, 2, 2]; the -3 end has log discrepancy (1 + 3)/7
    assert_eq!(v["mld"], "4/7");
    assert_eq!(v["decimal"], "0.571428571429");
    assert_eq!(v["oracle"]["agrees"], true);
    assert_eq!(v["classification"], "klt");
}

#[test]
fn solve_csv_lists_every_vertex() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("a3.json");
    assert!(gmld(&["gen-hj", "4", "3", "--out", arg(&model)]).status.success());
    let o = gmld(&["solve", arg(&model), "--format", "csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(
        text,
        "vertex,log-discrepancy,decimal\n0,1,1.000000000000\n1,1,1.000000000000\n2,1,1.000000000000\n"
    );
}

#[test]
fn invalid_models_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "loop.json",
        r#"{"basis":["1"],"graph":{"vertices":[{"id":0,"weight":-1}],"edges":[[0,0]]},"branches":[],"nefloads":{}}"#,
    );
    let o = gmld(&["solve", arg(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("graph.edges[0]"));

    let missing = dir.path().join("absent.json");
    assert_eq!(gmld(&["mld", arg(&missing)]).status.code(), Some(1));
    assert_eq!(gmld(&["scan", "--family", "random"]).status.code(), Some(1));
    assert_eq!(gmld(&["no-such-command"]).status.code(), Some(1));
    let o = gmld(&["gen-hj", "5", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seeded_scans_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    for format in ["json", "csv"] {
        let a = dir.path().join(format!("a.{format}"));
        let b = dir.path().join(format!("b.{format}"));
        for out in [&a, &b] {
            let o = gmld(&[
                "scan", "--family", "random", "--seed", "7", "--count", "12", "--format", format,
                "--out", arg(out),
            ]);
            assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
    let csv = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(csv.lines().count(), 13);
    assert!(csv.starts_with(
        "digest,n-vertices,mld-exact,mld-decimal,classification,realizing-locus,violations\n"
    ));
}

#[test]
fn cone_scan_value_set() {
    let o = gmld(&["scan", "--family", "hj", "--n-min", "2", "--n-max", "6", "--q", "1"]);
    assert!(o.status.success());
    let v = json(&o);
    let values: Vec<&str> = v["aggregate"]["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["exact"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["1/3", "2/5", "1/2", "2/3", "1"]);
    assert_eq!(v["aggregate"]["min_gap"]["exact"], "1/15");
    assert_eq!(v["aggregate"]["violation_count"], 0);
}

#[test]
fn scan_with_coefficient_set() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "load.json", SQRT2_LOAD);
    let o = gmld(&[
        "scan", "--family", "models", "--model", arg(&model), "--coefficient", "0,1/2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["aggregate"]["span_closed"], true);
    // a = 1 - sqrt2/4 is outside the span of {1, 1/2}
    let o = gmld(&[
        "scan", "--family", "models", "--model", arg(&model), "--coefficient", "1/2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["aggregate"]["span_closed"], false);
}

#[test]
fn perturbation_exit_codes() {
    let dir = TempDir::new().unwrap();
    let load = write(&dir, "load.json", SQRT2_LOAD);
    let o = gmld(&["perturb", arg(&load)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["disclaimer"].as_str().unwrap().contains("no uniform perturbation radius"));
    assert_eq!(v["records"].as_array().unwrap().len(), 2);

    let barely = write(&dir, "barely.json", BARELY_LC);
    let o = gmld(&["perturb", arg(&barely), "--delta", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["violations"].as_array().unwrap().len(), 1);
    assert_eq!(gmld(&["perturb", arg(&barely)]).status.code(), Some(0));
}

#[test]
fn partition_of_sqrt2() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "load.json", SQRT2_LOAD);
    let o = gmld(&["partition", arg(&model), "--delta", "1/10"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["basis"], serde_json::json!(["1", "sqrt2"]));
    assert_eq!(v["entries"].as_array().unwrap().len(), 2);
    assert!(v["failures"].as_array().unwrap().is_empty());
    // both neighbours lie within 1/10 of sqrt2
    for s in v["splits"].as_array().unwrap() {
        for key in ["lower", "upper"] {
            let (n, d) = s[key].as_str().unwrap().split_once('/').unwrap();
            let x = n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap();
            assert!((x - 2f64.sqrt()).abs() <= 0.1);
        }
    }
}

#[test]
fn complement_documents() {
    let dir = TempDir::new().unwrap();
    let ok = write(&dir, "ok.json", r#"{"n":6,"b":["5/6"],"b_plus":["5/6"]}"#);
    let o = gmld(&["check-complement", arg(&ok)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["coefficients"]["ok"], true);
    assert_eq!(v["coefficients"]["entries"][0]["threshold"], "5/6");

    let short = write(&dir, "short.json", r#"{"n":6,"b":["5/6"],"b_plus":["2/3"]}"#);
    let o = gmld(&["check-complement", arg(&short)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["coefficients"]["ok"], false);

    let bad = write(&dir, "bad.json", r#"{"n":2,"b":["1/2"],"b_plus":[]}"#);
    assert_eq!(gmld(&["check-complement", arg(&bad)]).status.code(), Some(1));
}

#[test]
fn verify_lemmas_on_corpus_and_files() {
    let o = gmld(&["verify-lemmas", "--seed", "3", "--count", "10", "--oracle-depth", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert_eq!(v["instances"], 10);
    assert_eq!(v["violation_count"], 0);

    let dir = TempDir::new().unwrap();
    let model = write(&dir, "load.json", SQRT2_LOAD);
    let o = gmld(&["verify-lemmas", arg(&model)]);
    assert_eq!(o.status.code(), Some(0));
    let checks = &json(&o)["suites"][0]["checks"];
    assert!(checks.as_array().unwrap().iter().any(|c| c == "oracle"));
}

#[test]
fn refine_budget_flag_is_accepted() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "load.json", SQRT2_LOAD);
    assert!(gmld(&["solve", arg(&model), "--refine-budget", "40"]).status.success());
}
