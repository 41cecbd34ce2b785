//! End-to-end runs of the command-line binary.

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

use levybound::reference_oracles::{bs_closed_form, BsContract};

const BS_CALL: &str = r#"{
    "model": {"family": "black_scholes", "r": 0.05, "sigma": 0.2},
    "payoff": {"kind": "call", "s0": 100, "strikes": [100]},
    "tau": 0.5,
    "plan": {"mode": "tolerance", "tolerance": 1e-9}
}"#;

const MERTON_BINARY: &str = r#"{
    "model": {"family": "merton", "r": 0.05, "sigma": 0.1765,
              "lambda": 0.089, "jump_mean": -0.8898, "jump_std": 0.4505},
    "payoff": {"kind": "binary", "s0": 100, "lower": 95, "upper": 105},
    "tau": 1.0,
    "plan": {"mode": "optimize", "n": 16},
    "sweep": {"ns": [32, 8, 16], "alpha_count": 1, "delta_omega_count": 24}
}"#;

fn run(cmd: &str, config: &str, dir: &Path, extra: &[&str]) -> Output {
    let path = dir.join(format!("{cmd}.json"));
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_levybound"))
        .arg(cmd)
        .arg("--config")
        .arg(&path)
        .args(extra)
        .output()
        .unwrap()
}

/// Rows of a CSV document keyed by column name, comment lines skipped.
fn rows(text: &str) -> Vec<HashMap<String, String>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            header
                .iter()
                .zip(rec.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

fn num(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key]
        .parse()
        .unwrap_or_else(|_| panic!("{key} = {}", row[key]))
}

#[test]
fn price_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("price", BS_CALL, dir.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# config: "));
    let row = &rows(&text)[0];
    assert_eq!(row["schema_version"], "1");
    let cf = bs_closed_form(100.0, BsContract::Call { strike: 100.0 }, 0.05, 0.2, 0.5).unwrap();
    assert!((num(row, "value") - cf.value).abs() < 1e-8);
    assert!(num(row, "bound_total") < 1e-9);
}

#[test]
fn call_with_small_alpha_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = BS_CALL.replace(
        r#""plan": {"mode": "tolerance", "tolerance": 1e-9}"#,
        r#""plan": {"mode": "explicit", "alpha": 0.5, "a": 0.2, "delta_omega": 0.3, "n": 64}"#,
    );
    let out = run("price", &cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("alpha > 1"), "{err}");
}

#[test]
fn malformed_json_and_missing_file_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run("bound", "{ nope", dir.path(), &[]).status.code(),
        Some(2)
    );
    let out = Command::new(env!("CARGO_BIN_EXE_levybound"))
        .args(["price", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_levybound"))
        .args(["frobnicate"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // e^{τΨ(α)} overflows for a strongly damped, very volatile model.
    let cfg = BS_CALL
        .replace(r#""sigma": 0.2"#, r#""sigma": 5.0"#)
        .replace(
            r#""plan": {"mode": "tolerance", "tolerance": 1e-9}"#,
            r#""plan": {"mode": "explicit", "alpha": 40.0, "a": 1.0, "delta_omega": 0.3, "n": 64}"#,
        );
    let out = run("price", &cfg, dir.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn bound_reports_both_conventions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = BS_CALL.replace(
        r#""plan": {"mode": "tolerance", "tolerance": 1e-9}"#,
        r#""plan": {"mode": "explicit", "alpha": 2.0, "a": 0.5, "delta_omega": 0.4, "n": 24}"#,
    );
    let out = run("bound", &cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let row = &rows(&String::from_utf8(out.stdout).unwrap())[0];
    let ratio = num(row, "quadrature_theorem") / num(row, "quadrature_explicit");
    assert!((ratio - 0.5).abs() < 1e-12, "{ratio}");
    let t = num(row, "truncation_part");
    assert!(
        (num(row, "bound_explicit") - num(row, "quadrature_explicit") - t).abs()
            <= 1e-12 * t.max(1e-300) + 1e-300
    );
    assert!(num(row, "bound_seconds") < 0.5);
}

#[test]
fn optimize_writes_identical_traces() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = run(
            "optimize",
            MERTON_BINARY,
            d.path(),
            &["--out", d.path().to_str().unwrap(), "--seed", "7"],
        );
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let ta = std::fs::read(a.path().join("optimize_trace.csv")).unwrap();
    let tb = std::fs::read(b.path().join("optimize_trace.csv")).unwrap();
    assert!(!ta.is_empty());
    assert_eq!(ta, tb);
    let best = std::fs::read_to_string(a.path().join("optimize.csv")).unwrap();
    assert!(best.contains("# seed: 7"));
    let row = &rows(&best)[0];
    let trace = rows(&String::from_utf8(ta).unwrap());
    assert_eq!(trace.len(), row["evaluations"].parse::<usize>().unwrap());
    let best_total = num(row, "bound_total");
    assert!(trace.iter().all(|t| num(t, "bound_total") >= best_total));
}

#[test]
fn optimize_rejects_explicit_plans() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = BS_CALL.replace(
        r#""plan": {"mode": "tolerance", "tolerance": 1e-9}"#,
        r#""plan": {"mode": "explicit", "alpha": 2.0, "a": 0.5, "delta_omega": 0.4, "n": 24}"#,
    );
    assert_eq!(
        run("optimize", &cfg, dir.path(), &[]).status.code(),
        Some(2)
    );
}

#[test]
fn sweep_is_ordered_and_finite() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("sweep", MERTON_BINARY, dir.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let rs = rows(&text);
    let ns: Vec<usize> = rs.iter().map(|r| r["n"].parse().unwrap()).collect();
    assert_eq!(ns, vec![8, 16, 32]);
    for r in &rs {
        for (k, v) in r {
            if let Ok(x) = v.parse::<f64>() {
                assert!(x.is_finite(), "{k} = {v}");
            }
        }
        assert!(num(r, "bound") >= num(r, "e1"));
        assert!(num(r, "e1") >= num(r, "e2"));
    }
}

#[test]
fn convention_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = BS_CALL.replace(
        r#""plan": {"mode": "tolerance", "tolerance": 1e-9}"#,
        r#""plan": {"mode": "explicit", "alpha": 2.0, "a": 0.5, "delta_omega": 0.4, "n": 24}"#,
    );
    let th = run("price", &cfg, dir.path(), &[]);
    let ex = run("price", &cfg, dir.path(), &["--convention", "explicit"]);
    let q = |o: &Output| {
        num(
            &rows(&String::from_utf8_lossy(&o.stdout))[0],
            "quadrature_part",
        )
    };
    assert!((q(&ex) / q(&th) - 2.0).abs() < 1e-12);
}
