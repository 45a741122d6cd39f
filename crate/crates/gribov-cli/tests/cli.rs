//! End-to-end runs of the binary: exit-code contract, strict config
//! rejection, schema shape, byte determinism across thread counts, and the
//! environment/flag precedence chain.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_gribov")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run_with(config: &Path, extra: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.arg("--config").arg(config).args(extra);
    // keep host environment variables from bleeding into the contract
    for var in [
        "GRIBOV_OUT",
        "GRIBOV_FORMAT",
        "GRIBOV_SEED",
        "GRIBOV_THREADS",
    ] {
        cmd.env_remove(var);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn trace_formula_config(out: &Path, lambda_triple: f64, mu: f64) -> String {
    format!(
        r#"{{
  "command": "trace-formula",
  "params": {{"lambda_cubic": 1.0, "lambda_quartic": 1.0, "mu": {mu}, "lambda_triple": {lambda_triple}}},
  "trunc": {{"dim": 40, "offset": 0}},
  "grids": {{"n_lo": 2, "n_hi": 4, "nodes": 256}},
  "output_path": "{}",
  "format": "csv",
  "seed": 7
}}"#,
        out.display()
    )
}

#[test]
fn diagonal_trace_formula_exits_clean_with_zero_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let cfg = write_config(dir.path(), "c.json", &trace_formula_config(&out, 0.0, 1.0));
    let res = run_with(&cfg, &[], &[]);
    assert!(
        res.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&res.stderr)
    );

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header.split(',').count(), 18);
    assert!(header.starts_with("n,radius,nodes,lhs_re"));
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 18, "row: {line}");
        let gap: f64 = cols[7].parse().unwrap();
        assert!(gap <= 1e-9, "diagonal gap {gap}");
        assert_eq!(*cols.last().unwrap(), "true");
        rows += 1;
    }
    assert_eq!(rows, 3);
}

#[test]
fn rejected_config_names_every_bad_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{
  "command": "trace-formula",
  "params": {"lambda_cubic": 1.0, "lambda_quartic": 1.0, "mu": 0.1, "lambda_triple": 0.05},
  "trunc": {"dim": 64, "offset": 0},
  "grids": {"n_lo": 1, "n_hi": 5, "nodes": 65},
  "output_path": "",
  "surprise": 1
}"#,
    );
    let res = run_with(&cfg, &[], &[]);
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8_lossy(&res.stderr);
    for needle in ["grids.n_lo", "grids.nodes", "output_path", "surprise"] {
        assert!(err.contains(needle), "missing {needle}:\n{err}");
    }
}

#[test]
fn negative_delta_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let cfg = write_config(
        dir.path(),
        "c.json",
        &format!(
            r#"{{
  "command": "semigroup",
  "params": {{"lambda_cubic": 1.0, "lambda_quartic": 1.0, "mu": 0.1, "lambda_triple": 0.05}},
  "trunc": {{"dim": 24, "offset": 0}},
  "grids": {{"t_values": [0.05, 0.1], "delta": -1.0}},
  "output_path": "{}"
}}"#,
            out.display()
        ),
    );
    let res = run_with(&cfg, &[], &[]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("grids.delta"));
}

#[test]
fn accretivity_hypothesis_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let cfg = write_config(
        dir.path(),
        "c.json",
        &format!(
            r#"{{
  "command": "diagnostics",
  "params": {{"lambda_cubic": 1.0, "lambda_quartic": 1.0, "mu": -1.0, "lambda_triple": 0.05}},
  "trunc": {{"dim": 64, "offset": 0}},
  "grids": {{"epsilons": [0.1], "delta": 0.5, "dims": [16, 32], "t_values": [1e-2, 1e-4]}},
  "output_path": "{}"
}}"#,
            out.display()
        ),
    );
    let res = run_with(&cfg, &[], &[]);
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(
        err.contains("mu"),
        "stderr should name the hypothesis:\n{err}"
    );
}

#[test]
fn flagged_rows_exit_two_but_write_results() {
    // a displaced spectrum: circles around the unperturbed eigenvalues
    // enclose the wrong count, so rows flag but the run completes
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let cfg = write_config(dir.path(), "c.json", &trace_formula_config(&out, 0.0, 4.0));
    let res = run_with(&cfg, &[], &[]);
    assert_eq!(res.status.code(), Some(2));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().skip(1).any(|l| l.ends_with(",false")));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn byte_determinism_across_threads_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    let cfg_body = format!(
        r#"{{
  "command": "semigroup",
  "params": {{"lambda_cubic": 1.0, "lambda_quartic": 1.0, "mu": 0.1, "lambda_triple": 0.05}},
  "trunc": {{"dim": 24, "offset": 0}},
  "grids": {{"t_values": [0.02, 0.05, 0.1, 0.2], "delta": 0.5}},
  "output_path": "{}"
}}"#,
        out1.display()
    );
    let cfg = write_config(dir.path(), "c.json", &cfg_body);
    let r1 = run_with(&cfg, &["--threads", "1"], &[]);
    assert!(
        r1.status.success(),
        "{}",
        String::from_utf8_lossy(&r1.stderr)
    );
    let r2 = run_with(
        &cfg,
        &["--threads", "4", "--out", out2.to_str().unwrap()],
        &[],
    );
    assert!(
        r2.status.success(),
        "{}",
        String::from_utf8_lossy(&r2.stderr)
    );
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "thread count changed report bytes");
    assert_eq!(
        std::str::from_utf8(&a)
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .split(',')
            .count(),
        10
    );
}

#[test]
fn seeded_diagnostics_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    let cfg = write_config(
        dir.path(),
        "c.json",
        &format!(
            r#"{{
  "command": "diagnostics",
  "params": {{"lambda_cubic": 1.0, "lambda_quartic": 1.0, "mu": 0.1, "lambda_triple": 0.05}},
  "trunc": {{"dim": 220, "offset": 0}},
  "grids": {{"epsilons": [0.1], "delta": 0.5, "dims": [16, 32], "t_values": [1e-3, 1e-4, 1e-5, 1e-6]}},
  "output_path": "{}",
  "format": "json",
  "seed": 11
}}"#,
            out1.display()
        ),
    );
    let r1 = run_with(&cfg, &["--threads", "3"], &[]);
    assert!(
        r1.status.success(),
        "{}",
        String::from_utf8_lossy(&r1.stderr)
    );
    let r2 = run_with(&cfg, &["--out", out2.to_str().unwrap()], &[]);
    assert!(
        r2.status.success(),
        "{}",
        String::from_utf8_lossy(&r2.stderr)
    );
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());

    // the emitted JSON is machine-readable and mirrors the CSV fields
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out1).unwrap()).unwrap();
    assert_eq!(parsed["command"], "diagnostics");
    assert_eq!(parsed["seed"], 11);
    let rows = parsed["rows"].as_array().unwrap();
    assert!(
        rows.len() >= 8,
        "expected the full battery, got {}",
        rows.len()
    );
    for row in rows {
        assert!(row["check"].is_string());
        assert!(row["valid"].is_boolean());
    }
}

#[test]
fn environment_sits_between_config_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_out = dir.path().join("from_config.csv");
    let env_out = dir.path().join("from_env.json");
    let flag_out = dir.path().join("from_flag.csv");
    let cfg = write_config(
        dir.path(),
        "c.json",
        &format!(
            r#"{{
  "command": "spectrum",
  "params": {{"lambda_cubic": 1.0, "lambda_quartic": 1.0, "mu": 0.1, "lambda_triple": 0.05}},
  "trunc": {{"dim": 16, "offset": 0}},
  "grids": {{}},
  "output_path": "{}"
}}"#,
            cfg_out.display()
        ),
    );

    // env overrides config for both path and format
    let r = run_with(
        &cfg,
        &[],
        &[
            ("GRIBOV_OUT", env_out.to_str().unwrap()),
            ("GRIBOV_FORMAT", "json"),
        ],
    );
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(env_out.exists() && !cfg_out.exists());
    let text = std::fs::read_to_string(&env_out).unwrap();
    assert!(text.starts_with("{\"command\":\"spectrum\""));

    // flags override env
    let r = run_with(
        &cfg,
        &["--out", flag_out.to_str().unwrap(), "--format", "csv"],
        &[
            ("GRIBOV_OUT", env_out.to_str().unwrap()),
            ("GRIBOV_FORMAT", "json"),
        ],
    );
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = std::fs::read_to_string(&flag_out).unwrap();
    assert!(text.starts_with("k,sigma_re"));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.ends_with(",true")));

    // a bad env value is a hard error, not a silent fallback
    let r = run_with(&cfg, &[], &[("GRIBOV_THREADS", "zero")]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("GRIBOV_THREADS"));
}

#[test]
fn trotter_rows_carry_global_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let cfg = write_config(
        dir.path(),
        "c.json",
        &format!(
            r#"{{
  "command": "trotter",
  "params": {{"lambda_cubic": 1.0, "lambda_quartic": 1.0, "mu": 0.1, "lambda_triple": 0.05}},
  "trunc": {{"dim": 16, "offset": 0}},
  "grids": {{"t": 1.0, "n_values": [2, 4, 8, 16]}},
  "output_path": "{}"
}}"#,
            out.display()
        ),
    );
    let res = run_with(&cfg, &[], &[]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 4);
    // same fit constant on every row; deviations shrink monotonically
    let fit: Vec<&str> = rows.iter().map(|r| r[2]).collect();
    assert!(fit.windows(2).all(|w| w[0] == w[1]));
    let devs: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(devs.windows(2).all(|w| w[1] <= w[0]), "{devs:?}");
}
