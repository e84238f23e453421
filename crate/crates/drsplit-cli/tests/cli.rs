//! End-to-end tests of the `drsplit` binary: exit codes, output files,
//! manifest completeness, numeric values against independent oracles, and
//! byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use drsplit::{Matrix, Vector};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_drsplit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should launch")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Pulls `key=<float>` off a line-oriented stdout dump.
fn stdout_field(stdout: &str, key: &str) -> f64 {
    let prefix = format!("{key}=");
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}=` line in:\n{stdout}"))
        .parse()
        .unwrap_or_else(|_| panic!("`{key}` value not a float in:\n{stdout}"))
}

fn write_problem(path: &Path, p: &[&[f64]], q: &[f64], s: &[&[f64]], t: &[f64], l: &[&[f64]]) {
    let rows = |m: &[&[f64]]| -> Vec<Vec<f64>> { m.iter().map(|r| r.to_vec()).collect() };
    let body = serde_json::json!({
        "P": rows(p), "q": q, "S": rows(s), "t": t, "L": rows(l),
    });
    std::fs::write(path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
}

/// The 2×2 test problem used by several cases below.
fn demo_problem(dir: &Path) -> PathBuf {
    let path = dir.join("problem.json");
    write_problem(
        &path,
        &[&[3.0, 0.5], &[0.5, 2.0]],
        &[1.0, -2.0],
        &[&[1.5, 0.0], &[0.0, 1.0]],
        &[0.5, 0.0],
        &[&[1.0, 2.0], &[0.0, 1.0]],
    );
    path
}

/// Saddle point of the demo problem by the normal equations:
/// `x* = −(P + LᵀSL)⁻¹(q + Lᵀt)`, `y* = S L x* + t`.
fn demo_oracle() -> (Vector, Vector) {
    let p = Matrix::from_row_slice(2, 2, &[3.0, 0.5, 0.5, 2.0]);
    let q = Vector::from_column_slice(&[1.0, -2.0]);
    let s = Matrix::from_row_slice(2, 2, &[1.5, 0.0, 0.0, 1.0]);
    let t = Vector::from_column_slice(&[0.5, 0.0]);
    let l = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
    let lhs = &p + l.transpose() * &s * &l;
    let rhs = -(&q + l.transpose() * &t);
    let x = lhs.lu().solve(&rhs).expect("nonsingular");
    let y = &s * (&l * &x) + &t;
    (x, y)
}

fn manifest_outputs(manifest_path: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(manifest_path).expect("manifest readable");
    let v: serde_json::Value = serde_json::from_str(&text).expect("manifest is JSON");
    for key in ["command", "parameters", "seed", "outputs", "timestamp"] {
        assert!(v.get(key).is_some(), "manifest missing `{key}`: {text}");
    }
    v["outputs"]
        .as_array()
        .expect("outputs is an array")
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn rates_single_skew_row_hits_the_known_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let res = run(&[
        "rates", "--case", "skew", "--beta", "1", "--mu", "1",
        "--out", out.to_str().unwrap(),
    ]);
    assert_exit(&res, 0);

    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("case,beta,mu,gamma,rate"));
    let row = lines.next().expect("one data row");
    assert!(lines.next().is_none(), "exactly one row expected");
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "skew");
    let rate: f64 = fields[4].parse().unwrap();
    assert!(
        (rate - 0.809_016_994_374_947_5).abs() < 1e-15,
        "rate {rate} should print as 0.80902 after rounding"
    );
    assert!(!csv.contains('\r'), "LF line endings only");

    // Manifest invariant: every listed output exists.
    let listed = manifest_outputs(&dir.path().join("r.manifest.json"));
    assert!(listed.iter().any(|p| p.ends_with("r.csv")));
    for p in listed {
        assert!(Path::new(&p).exists(), "{p} listed but missing");
    }
}

#[test]
fn rates_default_grid_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("g1.csv");
    let out2 = dir.path().join("g2.csv");
    assert_exit(&run(&["rates", "--seed", "7", "--out", out1.to_str().unwrap()]), 0);
    assert_exit(&run(&["rates", "--seed", "7", "--out", out2.to_str().unwrap()]), 0);
    let b1 = std::fs::read(&out1).unwrap();
    let b2 = std::fs::read(&out2).unwrap();
    assert_eq!(b1, b2, "same command + seed must give byte-identical CSV");

    let text = String::from_utf8(b1).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(rows.len() > 1500, "default grid should be dense, got {}", rows.len());
    for row in rows {
        let rate: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(rate.is_finite() && rate > 0.0 && rate <= 1.0 + 1e-12, "bad rate in `{row}`");
    }
}

#[test]
fn rates_json_format_parses() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let res = run(&[
        "rates", "--case", "lip", "--beta", "1,2", "--mu", "0.5",
        "--format", "json", "--out", out.to_str().unwrap(),
    ]);
    assert_exit(&res, 0);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let arr = v.as_array().expect("JSON array");
    assert_eq!(arr.len(), 2);
    for item in arr {
        assert_eq!(item["case"], "lip");
        assert!(item["rate"].as_f64().unwrap() < 1.0);
    }
}

#[test]
fn rates_tiny_mu_sits_near_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tiny.csv");
    let res = run(&[
        "rates", "--case", "skew", "--beta", "1", "--mu", "0.000001",
        "--out", out.to_str().unwrap(),
    ]);
    assert_exit(&res, 0);
    let csv = std::fs::read_to_string(&out).unwrap();
    let rate: f64 = csv.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!(rate < 1.0, "still a contraction: {rate}");
    assert!((1.0 - rate) < 1e-3, "vanishing strong monotonicity drives the rate to 1: {rate}");
}

#[test]
fn rates_rejects_bad_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let res = run(&["rates", "--beta", "nope", "--out", out.to_str().unwrap()]);
    assert_exit(&res, 1);
    let res = run(&[
        "rates", "--case", "skew", "--beta", "1", "--mu", "1",
        "--gamma", "-2", "--out", out.to_str().unwrap(),
    ]);
    assert_exit(&res, 1);
    // All requested rows out of domain (classical case with beta < mu).
    let res = run(&[
        "rates", "--case", "a", "--beta", "0.5", "--mu", "2",
        "--out", out.to_str().unwrap(),
    ]);
    assert_exit(&res, 1);
}

#[test]
fn rates_unwritable_output_is_an_io_error() {
    let res = run(&[
        "rates", "--case", "skew", "--beta", "1", "--mu", "1",
        "--out", "/nonexistent-dir/deeper/r.csv",
    ]);
    assert_exit(&res, 2);
}

#[test]
fn solve_matches_the_normal_equations_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let problem = demo_problem(dir.path());
    let out = dir.path().join("sol.json");
    let res = run(&[
        "solve", "--problem", problem.to_str().unwrap(),
        "--tol", "1e-12", "--out", out.to_str().unwrap(),
    ]);
    assert_exit(&res, 0);

    let stdout = stdout_of(&res);
    let rate_bound = stdout_field(&stdout, "rate_bound");
    let r_emp = stdout_field(&stdout, "r_emp");
    assert!(rate_bound > 0.0 && rate_bound < 1.0);
    assert!(r_emp <= rate_bound + 0.01, "r_emp {r_emp} vs bound {rate_bound}");

    let sol: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let (x_star, y_star) = demo_oracle();
    for (i, xs) in x_star.iter().enumerate() {
        let got = sol["x"][i].as_f64().unwrap();
        assert!((got - xs).abs() < 1e-8, "x[{i}]: {got} vs oracle {xs}");
    }
    for (i, ys) in y_star.iter().enumerate() {
        let got = sol["y"][i].as_f64().unwrap();
        assert!((got - ys).abs() < 1e-8, "y[{i}]: {got} vs oracle {ys}");
    }
    assert!(sol["kkt"].as_f64().unwrap() < 1e-8);

    // Trace CSV: header plus one row per iteration, step norms decaying.
    let trace = std::fs::read_to_string(dir.path().join("sol.trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("iter,step_norm,shadow_residual"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len() as u64, sol["iters"].as_u64().unwrap());
    let first: f64 = rows.first().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    let last: f64 = rows.last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(last < first * 1e-6, "steps should have collapsed: {first} -> {last}");

    let listed = manifest_outputs(&dir.path().join("sol.manifest.json"));
    assert_eq!(listed.len(), 2);
    for p in listed {
        assert!(Path::new(&p).exists(), "{p} listed but missing");
    }
}

#[test]
fn solve_orders_agree_on_the_saddle_point() {
    let dir = tempfile::tempdir().unwrap();
    let problem = demo_problem(dir.path());
    let mut solutions = Vec::new();
    for order in ["ba", "ab"] {
        let out = dir.path().join(format!("sol-{order}.json"));
        let res = run(&[
            "solve", "--problem", problem.to_str().unwrap(), "--order", order,
            "--tol", "1e-12", "--out", out.to_str().unwrap(),
        ]);
        assert_exit(&res, 0);
        let sol: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        solutions.push(sol);
    }
    for key in ["x", "y"] {
        let a = solutions[0][key].as_array().unwrap();
        let b = solutions[1][key].as_array().unwrap();
        for (va, vb) in a.iter().zip(b) {
            let (va, vb) = (va.as_f64().unwrap(), vb.as_f64().unwrap());
            assert!((va - vb).abs() < 1e-8, "{key}: {va} vs {vb}");
        }
    }
}

#[test]
fn solve_trace_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let problem = demo_problem(dir.path());
    let mut bytes = Vec::new();
    for name in ["d1.json", "d2.json"] {
        let out = dir.path().join(name);
        let res = run(&[
            "solve", "--problem", problem.to_str().unwrap(),
            "--seed", "3", "--out", out.to_str().unwrap(),
        ]);
        assert_exit(&res, 0);
        bytes.push(std::fs::read(out.with_extension("trace.csv")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn solve_error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.json");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ this is not json").unwrap();
    let res = run(&["solve", "--problem", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_exit(&res, 1);

    // Structurally valid JSON but an invalid problem (P not positive
    // definite) is also a parameter error.
    let indefinite = dir.path().join("indef.json");
    write_problem(
        &indefinite,
        &[&[0.0, 0.0], &[0.0, 0.0]],
        &[0.0, 0.0],
        &[&[1.0]],
        &[0.0],
        &[&[1.0, 0.0]],
    );
    let res = run(&[
        "solve", "--problem", indefinite.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_exit(&res, 1);

    let res = run(&[
        "solve", "--problem", dir.path().join("missing.json").to_str().unwrap(),
        "--out", out.to_str().unwrap(),
    ]);
    assert_exit(&res, 2);
}

#[test]
fn solve_non_convergence_still_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let problem = demo_problem(dir.path());
    let out = dir.path().join("partial.json");
    let res = run(&[
        "solve", "--problem", problem.to_str().unwrap(),
        "--max-iter", "3", "--out", out.to_str().unwrap(),
    ]);
    assert_exit(&res, 3);
    assert!(out.exists(), "partial solution JSON written");
    assert!(out.with_extension("trace.csv").exists(), "partial trace written");
    assert!(out.with_extension("manifest.json").exists(), "manifest written");
    let stdout = stdout_of(&res);
    assert!(stdout.contains("converged=false"));
}

#[test]
fn solve_loose_tolerance_stops_after_one_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let problem = demo_problem(dir.path());
    let out = dir.path().join("one.json");
    let res = run(&[
        "solve", "--problem", problem.to_str().unwrap(),
        "--tol", "10", "--out", out.to_str().unwrap(),
    ]);
    assert_exit(&res, 0);
    let sol: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(sol["iters"].as_u64(), Some(1));
}

#[test]
fn sweep_gamma_finds_the_interior_minimizer() {
    let res = run(&["sweep-gamma", "--beta", "1", "--mu", "1"]);
    assert_exit(&res, 0);
    let stdout = stdout_of(&res);
    let gamma_star = stdout_field(&stdout, "gamma_star");
    let rate_at_star = stdout_field(&stdout, "rate_at_star");
    let rate_at_one = stdout_field(&stdout, "rate_at_one");
    let quintic = stdout_field(&stdout, "quintic_residual");

    assert!((gamma_star - 0.535_293_940_631_455).abs() < 1e-5, "gamma* = {gamma_star}");
    assert!(rate_at_star < rate_at_one, "tuned step must beat gamma = 1");
    assert!(quintic.abs() < 1e-3, "minimizer should zero the quintic: {quintic}");

    // Scale invariance: doubling beta = mu halves the minimizer, and the
    // quintic line only appears at beta = mu = 1.
    let res2 = run(&["sweep-gamma", "--beta", "2", "--mu", "2"]);
    assert_exit(&res2, 0);
    let stdout2 = stdout_of(&res2);
    let gs2 = stdout_field(&stdout2, "gamma_star");
    assert!((gs2 - gamma_star / 2.0).abs() < 1e-5, "{gs2} vs {gamma_star}/2");
    assert!(!stdout2.contains("quintic_residual"));
}

#[test]
fn sweep_gamma_rejects_nonpositive_parameters() {
    assert_exit(&run(&["sweep-gamma", "--beta", "0", "--mu", "1"]), 1);
    assert_exit(&run(&["sweep-gamma", "--beta", "1", "--mu", "-1"]), 1);
}

#[test]
fn verify_prints_a_full_table_and_exits_zero() {
    let res = run(&["verify", "--seed", "42"]);
    assert_exit(&res, 0);
    let stdout = stdout_of(&res);
    let pass_lines = stdout.lines().filter(|l| l.starts_with("PASS")).count();
    assert!(pass_lines >= 25, "expected a full table, got {pass_lines} PASS lines");
    assert!(!stdout.contains("FAIL"));
    assert!(stdout.contains("sharpness-grid"));
    assert!(stdout.contains("checks passed"));

    // A different seed draws different samples but the identities hold.
    assert_exit(&run(&["verify", "--seed", "20260819"]), 0);
}

#[test]
fn usage_errors_and_help() {
    let res = run(&["frobnicate"]);
    assert_exit(&res, 1);
    let res = run(&["--help"]);
    assert_exit(&res, 0);
    assert!(stdout_of(&res).contains("sweep-gamma"));
    let res = run(&["solve"]); // missing required --problem/--out
    assert_exit(&res, 1);
}
