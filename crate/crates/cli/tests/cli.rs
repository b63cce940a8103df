use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lifespan"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], config: Option<&Path>, out: &Path) -> Output {
    let mut cmd = bin();
    cmd.args(args).arg("--out").arg(out);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("cfg.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn leftovers(dir: &Path) -> Vec<String> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with(".tmp"))
        .collect()
}

const SMALL_CAMPAIGN: &str = r#"
[system]
n = 1
p = [2]

[data]
amplitude = 1.0
width = 1.0

[mesh]
h = 0.05

[campaign]
eps_min = 0.01
eps_max = 1.0
points = 6
replicates = 2
jitter = 0.05
slope_tolerance = 0.3
"#;

#[test]
fn exponents_writes_exact_values() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["exponents"], Some(&configs().join("system_2_3.toml")), out.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.path().join("exponents.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("j,p,alpha,alpha_float,l,rate_identity"));
    assert!(lines.next().unwrap().starts_with("1,2,3/5,"));
    assert!(lines.next().unwrap().starts_with("2,3,4/5,"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("-10/3"));
    assert!(leftovers(out.path()).is_empty());
}

#[test]
fn missing_config_is_an_error() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["exponents"], Some(Path::new("/nonexistent/cfg.toml")), out.path());
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["bound"], None, out.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[system]\nn = 1\np = [2]\nbogus = 1\n");
    let o = run(&["exponents"], Some(&cfg), dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn ode_minorant_passes() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["ode"], Some(&configs().join("ode_minorant.toml")), out.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(out.path().join("trajectory.csv").exists());
    let summary = std::fs::read_to_string(out.path().join("ode_summary.csv")).unwrap();
    assert!(summary.lines().count() >= 2);
}

#[test]
fn testfn_checks_pass() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["testfn"], Some(&configs().join("testfn_n2.toml")), out.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(out.path().join("psi.csv").exists());
    assert!(out.path().join("eigen_check.csv").exists());
}

#[test]
fn campaign_is_deterministic_and_reconciles() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_CAMPAIGN);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let oa = run(&["campaign", "--seed", "7", "--jobs", "2"], Some(&cfg), &a);
    let ob = run(&["campaign", "--seed", "7", "--jobs", "1"], Some(&cfg), &b);
    assert_eq!(oa.status.code(), Some(0), "{}", String::from_utf8_lossy(&oa.stdout));
    assert_eq!(ob.status.code(), Some(0));
    for name in ["campaign.csv", "loglog.csv", "fit.csv", "report.toml"] {
        let x = std::fs::read(a.join(name)).unwrap();
        let y = std::fs::read(b.join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs with the same seed");
    }
    assert_eq!(std::fs::read_to_string(a.join("campaign.csv")).unwrap().lines().count(), 13);
    assert!(leftovers(&a).is_empty());

    let c = dir.path().join("c");
    let oc = run(&["campaign", "--seed", "8"], Some(&cfg), &c);
    assert_eq!(oc.status.code(), Some(0));
    assert_ne!(
        std::fs::read(a.join("campaign.csv")).unwrap(),
        std::fs::read(c.join("campaign.csv")).unwrap()
    );

    let ok = run(&["reconcile"], None, &a);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASS"));
    let control = run(&["reconcile", "--alpha-max", "0.8"], None, &a);
    assert_eq!(control.status.code(), Some(1));
    assert!(std::fs::read_to_string(a.join("verdict.txt")).unwrap().contains("FAIL"));
}

#[test]
fn reconcile_without_report_is_an_error() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["reconcile"], None, out.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reconcile_of_global_report_is_not_a_pass() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.toml");
    std::fs::write(
        &report,
        r#"n = 3
p = ["4"]
alpha_max = 0.3333333333333333
criticality = "Subcritical"
slope_tolerance = 0.3
runs = []
"#,
    )
    .unwrap();
    let o = run(&["reconcile", "--report", report.to_str().unwrap()], None, dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("INCONCLUSIVE"));
}
