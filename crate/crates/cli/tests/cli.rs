use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hermite-lab"))
        .args(args)
        .env_remove("HERMITE_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn close(v: &Value, want: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() / want - 1.0).abs() < tol
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["bounds", "--n", "10", "--d", "0"]).status.code(), Some(2));
    assert_eq!(run(&["bounds", "--n", "0", "--d", "3"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let two = write(dir.path(), "two.csv", "d,ks\n2,0.01\n3,0.02\n");
    assert_eq!(run(&["fit", "--input", &two]).status.code(), Some(2));

    let bad = write(dir.path(), "bad.txt", "0.1\nabc\n");
    assert_eq!(run(&["test", "--input", &bad, "--test", "sb"]).status.code(), Some(2));

    let ok = write(dir.path(), "ok.txt", "0.1\n0.2\n");
    assert_eq!(run(&["test", "--input", &ok, "--test", "ht"]).status.code(), Some(2));
    assert_eq!(run(&["test", "--input", &ok, "--test", "sb", "--mc-pvalue", "10"]).status.code(), Some(2));
}

#[test]
fn unreadable_input_and_unwritable_output() {
    let out = run(&["test", "--input", "/nonexistent/sample.txt", "--test", "sb"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["--output", "/nonexistent/dir/out.json", "bounds", "--n", "10", "--d", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bounds_and_constants_values() {
    let v = json(&["bounds", "--n", "1000", "--d", "4"]);
    let row = &v["rows"][0];
    let want = 89.721_253_319_325_575 * 4f64.powf(0.75) * 64.0 / 1000f64.sqrt();
    assert!(close(&row["upper"], want, 1e-12));

    let v = json(&["constants", "--d-max", "8"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    let d3 = rows.iter().find(|r| r["d"] == 3).unwrap();
    assert_eq!(d3["fourth_moment"], "3348");
    assert_eq!(d3["fourth_moment_routes_agree"], true);
    assert!(close(&rows[1]["cd_oracle"], 923.440_620_799_126, 1e-12));
}

#[test]
fn sb_on_zeros_is_three_n_over_thirty_two() {
    let dir = tempfile::tempdir().unwrap();
    let zeros = write(dir.path(), "zeros.txt", "x\n0\n0\n# comment\n0\n\n0\n0\n0\n0\n0\n");
    let v = json(&["test", "--input", &zeros, "--test", "sb"]);
    assert_eq!(v["n"], 8);
    assert!(close(&v["statistic"], 3.0 * 8.0 / 32.0, 1e-12));
    assert!(v["p_value"].as_f64().unwrap() > 0.0);
}

#[test]
fn hm4_needs_monte_carlo_for_a_p_value() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "x.txt", "0.3\n-1.2\n0.8\n2.1\n-0.4\n");
    let v = json(&["test", "--input", &data, "--test", "hm4"]);
    assert!(v["p_value"].is_null());
    assert!(v["notes"][0].as_str().unwrap().contains("--mc-pvalue"));

    let v = json(&["test", "--input", &data, "--test", "hm4", "--mc-pvalue", "500"]);
    let p = v["p_value"].as_f64().unwrap();
    assert!(p > 0.0 && p <= 1.0);
}

#[test]
fn experiment_is_identical_across_thread_counts() {
    let args = |t: &'static str| {
        ["--threads", t, "--format", "csv", "experiment", "--n", "300", "--d-min", "2", "--d-max", "5", "--replicates", "2000"]
    };
    let one = run(&args("1"));
    let four = run(&args("4"));
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let json_one = run(&["--threads", "1", "experiment", "--n", "300", "--d-max", "4", "--replicates", "500"]);
    let json_four = run(&["--threads", "4", "experiment", "--n", "300", "--d-max", "4", "--replicates", "500"]);
    assert_eq!(json_one.stdout, json_four.stdout);
}

#[test]
fn experiment_output_feeds_fit() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let path = dir.path().join(format!("exp.{format}"));
        let path = path.to_str().unwrap();
        let out = run(&[
            "--format", format, "--output", path, "experiment", "--n", "500", "--replicates", "1000",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v = json(&["fit", "--input", path]);
        assert_eq!(v["points"].as_array().unwrap().len(), 7);
        assert!(v["c"].as_f64().unwrap().is_finite());
    }
}

#[test]
fn fit_recovers_exact_model_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut body = String::from("# synthetic\nd,ks\n");
    for d in 2..=8 {
        let x = d as f64;
        body.push_str(&format!("{d},{:.17e}\n", 0.0015 * x.powf(-2.19) * (1.02 * x).exp()));
    }
    let path = write(dir.path(), "pts.csv", &body);
    let v = json(&["fit", "--input", &path]);
    assert!(close(&v["a"], 0.0015, 1e-9));
    assert!(close(&v["b"], -2.19, 1e-9));
    assert!(close(&v["c"], 1.02, 1e-9));
}
