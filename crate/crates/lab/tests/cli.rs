use std::path::Path;
use std::process::{Command, Output};

fn bergtube(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bergtube")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eval_is_positive_and_deterministic() {
    let args = ["eval", "--domain", "model:m=2,g0=1", "--kind", "bergman", "--x", "0", "--y", "1"];
    let a = bergtube(&args);
    let b = bergtube(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let line = stdout(&a).lines().find(|l| l.starts_with("kind=")).unwrap().to_string();
    let value: f64 = line.split_whitespace().find_map(|t| t.strip_prefix("value=")).unwrap().parse().unwrap();
    assert!(value > 0.0 && value.is_finite());
}

#[test]
fn outside_point_exits_with_domain_code() {
    let o = bergtube(&["eval", "--domain", "model:m=2,g0=1", "--x", "0", "--y", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not interior"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[domain]\nspec = \"model:m=2\"\nsmoothness = 3\n").unwrap();
    let o = bergtube(&["eval", "--config", cfg.to_str().unwrap(), "--x", "0", "--y", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("smoothness"));
    let o = bergtube(&["eval", "--domain", "model:m=2,colour=red", "--x", "0", "--y", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_config_and_csv_has_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let csv = dir.path().join("out.csv");
    let plot = dir.path().join("plot.py");
    std::fs::write(
        &cfg,
        format!(
            "[domain]\nspec = \"model:m=2,g0=1\"\n[kernel]\nkind = \"szego\"\n[point]\nx = 0.0\ny = -3.0\n[output]\ncsv = {:?}\nplot = {:?}\n",
            csv.display().to_string(),
            plot.display().to_string()
        ),
    )
    .unwrap();
    let o = bergtube(&["eval", "--config", cfg.to_str().unwrap(), "--y", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("kind=szego x=0 y=0.5"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,m,tau,rho,x,y,log_value,value,err_estimate,evaluations,status"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!((row[0], row[1], row[2], row[3], row[10]), ("szego", "2", "1", "0.5", "ok"));
    let script = std::fs::read_to_string(&plot).unwrap();
    assert!(script.contains("csv.DictReader") && script.contains(&csv.display().to_string()));
}

#[test]
fn dry_run_plans_without_evaluating() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fit.csv");
    let o = bergtube(&["fit", "--dry-run", "--domain", "model:m=2", "--tau", "0.7", "--points", "8", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("point ")).count(), 8);
    assert!(out.contains("config_hash="));
    assert!(!Path::new(&csv).exists());
    for args in [
        &["localize", "--dry-run", "--domain", "model:m=2,mollify=0.05", "--delta", "0.5"][..],
        &["hormander", "--dry-run", "--domain", "model:m=2", "--x0", "1"][..],
        &["sweep", "--dry-run", "--domain", "model:m=2", "--alpha", "2"][..],
    ] {
        let o = bergtube(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = bergtube(&["sweep", "--dry-run", "--domain", "model:m=2", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn predict_reports_exact_exponent() {
    let o = bergtube(&["predict", "--domain", "model:m=3", "--kind", "szego", "--tau", "0.8"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("exponent=4/3, c0="), "{out}");
}

#[test]
fn failed_headline_assertion_exits_one() {
    // far from the boundary the fixed-x slope is nowhere near -3
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fit.csv");
    let o = bergtube(&[
        "fit", "--domain", "model:m=2", "--mode", "fixed-x", "--x", "1", "--rho0", "4", "--points", "6", "--workers", "2",
        "--slope-tol", "1e-6", "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("expected=-3, FAIL"), "{out}");
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 7);
}
