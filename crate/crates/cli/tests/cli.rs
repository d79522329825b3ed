use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use holant::approx::{approx_partition, ApproxOptions, Mode};
use holant::graph::{generate, GraphFamilySpec};
use holant::models::{model_from_predicate, perturbed_ones, PredicateKind};
use serde_json::Value;
use tempfile::TempDir;

const TRIANGLE: &str = "3 3\n0 1\n1 2\n0 2\n";

fn holant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holant"))
        .args(args)
        .env_remove("HOLANT_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn triangle(dir: &TempDir) -> String {
    write(dir.path(), "tri.el", TRIANGLE).to_str().unwrap().to_owned()
}

#[test]
fn exact_counts_triangle_matchings() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    let out = holant(&["exact", "--graph", &tri, "--model", "matching"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), serde_json::json!({"re": 4.0, "im": 0.0}));

    let model = model_from_predicate(PredicateKind::Matching, 2, 2).unwrap();
    let file = write(dir.path(), "matching.json", &model.to_json());
    let out = holant(&["exact", "--graph", &tri, "--model", file.to_str().unwrap(), "--format", "text"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "4");
}

#[test]
fn inline_graph_and_vertex_model_file() {
    let dir = TempDir::new().unwrap();
    let hard_core = r#"{"a":[{"re":1,"im":0},{"re":1,"im":0}],
        "B":[[{"re":0,"im":0},{"re":1,"im":0}],[{"re":1,"im":0},{"re":1,"im":0}]]}"#;
    let file = write(dir.path(), "hardcore.json", hard_core);
    let out = holant(&["exact", "--graph", "3 3;0 1;1 2;0 2", "--model", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let value = stdout_json(&out);
    assert!((value["re"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert!(value["im"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn approx_output_is_the_library_certificate() {
    let out = holant(&["approx", "--family", "torus:3x3", "--model", "ones±uniform:0.02:7", "--eps", "1e-3"]);
    assert_eq!(out.status.code(), Some(0));
    let g = generate(&GraphFamilySpec::Torus2d { rows: 3, cols: 3 }).unwrap();
    let h = perturbed_ones(2, 4, 0.02, 7).unwrap();
    let cert = approx_partition(&g, &h, 1e-3, Mode::Multiplicative, ApproxOptions::default()).unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim_end(), cert.to_json());
    assert!(cert.q0 < 1.0);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    let outside = holant(&["approx", "--graph", &tri, "--model", "ones±uniform:0.5:1"]);
    assert_eq!(outside.status.code(), Some(1));
    let budget = holant(&["exact", "--graph", &tri, "--model", "ones", "--budget", "4"]);
    assert_eq!(budget.status.code(), Some(2));
    let env_budget = Command::new(env!("CARGO_BIN_EXE_holant"))
        .args(["exact", "--graph", &tri, "--model", "ones"])
        .env("HOLANT_BUDGET", "4")
        .output()
        .unwrap();
    assert_eq!(env_budget.status.code(), Some(2));
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_holant"))
        .args(["exact", "--graph", &tri, "--model", "ones", "--budget", "8"])
        .env("HOLANT_BUDGET", "4")
        .output()
        .unwrap();
    assert_eq!(flag_wins.status.code(), Some(0));
    let bad_graph = write(dir.path(), "bad.el", "3 2\n0 1\n");
    let parse = holant(&["exact", "--graph", bad_graph.to_str().unwrap(), "--model", "ones"]);
    assert_eq!(parse.status.code(), Some(3));
    assert_eq!(holant(&["exact", "--graph", &tri, "--model", "nonsense"]).status.code(), Some(3));
    assert_eq!(holant(&["exact", "--model", "ones"]).status.code(), Some(3));
    assert_eq!(holant(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(holant(&["approx", "--graph", &tri, "--model", "ones", "--eps", "0"]).status.code(), Some(3));
}

#[test]
fn constants_match_library() {
    let out = holant(&["constants"]);
    let v = stdout_json(&out);
    let c = holant::approx::zero_free_constants();
    assert_eq!(v["theta_star"].as_f64().unwrap(), c.theta_star);
    assert_eq!(v["x_star"].as_f64().unwrap(), c.x_star);
    let betas = v["beta_star"].as_array().unwrap();
    assert_eq!(betas.len(), 8);
    assert!((betas[0].as_f64().unwrap() - 0.71885).abs() < 1e-4);
}

#[test]
fn tutte_and_exptype() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    let out = holant(&["tutte", "--graph", &tri, "--v", "-1,0", "--q", "3"]);
    assert_eq!(stdout_json(&out), serde_json::json!({"re": 6.0, "im": 0.0}));
    let coeffs = stdout_json(&holant(&["tutte", "--graph", &tri, "--v", "-1"]));
    let re: Vec<f64> = coeffs.as_array().unwrap().iter().map(|c| c["re"].as_f64().unwrap()).collect();
    assert_eq!(re, vec![0.0, 2.0, -3.0, 1.0]);

    let out = holant(&["exptype", "--graph", &tri, "--poly", "chromatic", "--x", "30", "--radius", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let value = stdout_json(&out)["value"]["re"].as_f64().unwrap();
    assert!((value / (30.0 * 29.0 * 28.0) - 1.0).abs() < 1e-3);
    let inside = holant(&["exptype", "--graph", &tri, "--poly", "chromatic", "--x", "2", "--radius", "3"]);
    assert_eq!(inside.status.code(), Some(1));
}

#[test]
fn limits_roots_and_region_check() {
    let dir = TempDir::new().unwrap();
    let tri = triangle(&dir);
    let out = holant(&["limits", "--family", "cycle:10", "--model", "ones±uniform:0.05:3", "--sizes", "10,20,40,80"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    for key in ["family", "sizes", "values", "diffs", "cauchy", "engine_per_size"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["sizes"].as_array().unwrap().len(), 4);

    let lp = stdout_json(&holant(&["limits", "--graph", &tri, "--model", "ones±uniform:0.05:3", "--log-potential"]));
    assert!(lp["discrepancy"].as_f64().unwrap() < 1e-7);

    let roots = stdout_json(&holant(&["roots", "--graph", &tri, "--poly", "chromatic"]));
    assert_eq!(roots["degree"], 3);
    assert!((roots["max_modulus"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let q = stdout_json(&holant(&["roots", "--graph", &tri, "--model", "ones±uniform:0.05:3"]));
    let qhat = stdout_json(&holant(&["roots", "--graph", &tri, "--model", "ones±uniform:0.05:3", "--reversed"]));
    let inv = 1.0 / q["min_modulus"].as_f64().unwrap();
    assert!((qhat["max_modulus"].as_f64().unwrap() - inv).abs() < 1e-8 * inv);

    let check = holant(&["region-check", "--family", "cycle:6", "--samples", "30", "--seed", "5"]);
    assert_eq!(check.status.code(), Some(0));
    assert_eq!(stdout_json(&check)["zero_violations"], 0);
}

#[test]
fn selftest_passes_and_threads_flag_is_accepted() {
    let out = holant(&["selftest", "--threads", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(stdout_json(&out)["checks"].as_array().unwrap().len() >= 10);
}
