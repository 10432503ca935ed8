use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sigmak::cli::{parse_report, RunReport};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sigmak"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(sub: &str, args: &[&str]) -> Output {
    bin().arg(sub).args(args).output().expect("spawn sigmak")
}

fn run_config(sub: &str, name: &str, extra: &[&str]) -> (Output, RunReport) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let cfg = config(name);
    let mut args = vec!["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(sub, &args);
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    let report = parse_report(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{}", String::from_utf8_lossy(&o.stderr)));
    (o, report)
}

fn write_temp(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn canonical_positive_example() {
    let (o, r) = run_config("canonical", "canonical_positive.json", &[]);
    assert_eq!(o.status.code(), Some(0));
    let p = r.canonical.unwrap();
    assert_eq!((p.a, p.c, p.epsilon), (0.5, 0.5, 1.0));
    assert!(p.metric.starts_with("g_c = "));
}

#[test]
fn infeasible_negative_target_exits_2_with_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_temp(
        dir.path(),
        "bad.json",
        r#"{"dimension": 4, "k": 2, "case": "NegativeCone", "sigma": 1.5, "h": 0.9}"#,
    );
    let o = run("canonical", &["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("derived threshold 1") && err.contains("alternative expression 0.84"), "{err}");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in [
        "{not json",
        r#"{"dimension": 4, "k": 2, "case": "PositiveCone", "sigma": 1.0, "h": 0.0, "extra": 1}"#,
        r#"{"dimension": 4, "k": 4, "case": "PositiveCone", "sigma": 1.0, "h": 0.0}"#,
        r#"{"dimension": 4, "k": 2, "case": "PositiveCone", "sigma": -1.0, "h": 0.0}"#,
        r#"{"dimension": 3, "k": 1, "field": {"kind": "perturbed", "shape": "wave", "amplitude": 0.9}}"#,
    ]
    .iter()
    .enumerate()
    {
        let cfg = write_temp(dir.path(), &format!("c{i}.json"), text);
        let sub = if text.contains("perturbed") { "identities" } else { "canonical" };
        let o = run(sub, &["--config", cfg.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(run("canonical", &[]).status.code(), Some(2));
    assert_eq!(run("canonical", &["--config", "/nonexistent/config.json"]).status.code(), Some(2));
}

#[test]
fn failing_check_exits_1() {
    // Boundary residuals on a perturbed field sit well above 1e-20.
    let (o, r) = run_config("identities", "identities_perturbed.json", &["--tolerance", "1e-20", "--quadrature-n", "4"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!r.pass && r.checks.iter().any(|c| c.identity == "codazzi" && !c.pass));
}

#[test]
fn csv_tables_written_next_to_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.json");
    let cfg = config("sweep_negative.json");
    let o = run("sweep", &["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let checks = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(checks.starts_with("identity,N,lhs,rhs,abs_gap,rel_gap,ratio\n"));
    let cells = std::fs::read_to_string(dir.path().join("sweep_sweep.csv")).unwrap();
    assert_eq!(cells.lines().count(), 101);
}

#[test]
fn cone_reads_stdin_and_files() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = bin().arg("cone").stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(b"k 2\nspectrum 1 1 1\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let r = parse_report(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(r.cone.len(), 1);

    let dir = tempfile::tempdir().unwrap();
    let q = write_temp(dir.path(), "q.txt", "spectrum 1 2\nmatrix 1 2; 3 4\n");
    let o = run("cone", &[q.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "asymmetric matrix is rejected");
}

#[test]
fn overrides_are_echoed() {
    let (o, r) = run_config("canonical", "canonical_flat.json", &["--quadrature-n", "6", "--tolerance", "1e-9"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(r.config.quadrature_n, 6);
    assert_eq!(r.config.tolerances.quadrature, 1e-9);
    assert!(r.checks.iter().all(|c| c.tolerance == 1e-9 || c.tolerance == 0.0 || c.tolerance == 1e-10));
}

#[test]
fn reports_reproducible_across_runs_and_threads() {
    for (sub, name) in [("identities", "identities_perturbed.json"), ("canonical", "canonical_negative.json")] {
        let (_, a) = run_config(sub, name, &["--threads", "1"]);
        let (_, b) = run_config(sub, name, &["--threads", "3"]);
        let (_, c) = run_config(sub, name, &[]);
        let body = |r: &RunReport| r.body().to_json().unwrap();
        assert_eq!(body(&a), body(&b), "{name}");
        assert_eq!(body(&a), body(&c), "{name}");
    }
}

#[test]
fn report_schema_rejects_tampering() {
    let (_, r) = run_config("canonical", "canonical_flat.json", &[]);
    let good = r.to_json().unwrap();
    assert!(parse_report(&good).is_ok());
    let mut v: serde_json::Value = serde_json::from_str(&good).unwrap();
    v["pass"] = serde_json::Value::Bool(false);
    assert!(parse_report(&v.to_string()).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&good).unwrap();
    v["checks"][0]["abs_gap"] = serde_json::json!(1.0);
    assert!(parse_report(&v.to_string()).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&good).unwrap();
    v["surprise"] = serde_json::json!(0);
    assert!(parse_report(&v.to_string()).is_err());
}
