use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_aerial-d2d"));
    cmd.env_remove("AERIAL_D2D_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn manifest_of(out: &Path) -> PathBuf {
    PathBuf::from(format!("{}.manifest.toml", out.display()))
}

const PDF_CFG: &str = "\
[deployment]
lambda_parent = 2e-5
delta = 100.0
region_radius = 500.0
altitude = 100.0

[pdf]
samples = 3000
bins = 20
grid_points = 60

[mc]
seed = 7
";

const SWEEP_CFG: &str = "\
[deployment]
lambda_retained = 1e-4
delta = 50.0
region_radius = 500.0

[env]
preset = [\"high_rise_urban\", \"suburban\"]

[carrier]
f_c = 2.5e9

[power]
p_dd_dbm = 23.0
p_ul_dbm = 0.0
p_dl_dbm = 0.0
rss_th_dbm = [-100.0, -110.0]

[scheme]
kind = [\"TDDS\", \"RSSS\"]
association_probability = 0.5

[sweep]
l_min = 100.0
l_max = 2500.0
n_points = 4

[mc]
replicates = 200
seed = 3
";

#[test]
fn missing_parent_density_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "bad.toml", "[deployment]\ndelta = 100.0\nregion_radius = 500.0\naltitude = 100.0\n");
    let out = dir.path().join("x.csv");
    let o = run(&["pdf", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("deployment.lambda_parent: required"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unreadable_config_is_a_config_error() {
    let o = run(&["pdf", "--config", "/nonexistent/cfg.toml", "--out", "/tmp/never.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pdf_output_is_deterministic_and_replayable() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "pdf.toml", PDF_CFG);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    let o = run(&["pdf", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap(), "--workers", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("mean |pdf_exact - pdf_approx| over 60 grid points:"));
    let o = run(&["pdf", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap(), "--workers", "3"]);
    assert!(o.status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let manifest = manifest_of(&a);
    let o = run(&["pdf", "--config", manifest.to_str().unwrap(), "--out", c.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&c).unwrap());

    let text = fs::read_to_string(&a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r_m,pdf_exact,pdf_approx,hist_density,hist_stderr"));
    assert_eq!(lines.count(), 60);
}

#[test]
fn seed_changes_histogram_only() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "pdf.toml", PDF_CFG);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(run(&["pdf", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]).status.success());
    assert!(run(&["pdf", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap(), "--seed", "8"])
        .status
        .success());
    let col = |p: &Path, i: usize| -> Vec<String> {
        fs::read_to_string(p).unwrap().lines().skip(1).map(|l| l.split(',').nth(i).unwrap().to_owned()).collect()
    };
    assert_eq!(col(&a, 1), col(&b, 1));
    assert_ne!(col(&a, 3), col(&b, 3));
    assert!(fs::read_to_string(manifest_of(&b)).unwrap().contains("seed = 8"));
}

#[test]
fn seed_from_environment_when_config_has_none() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "pdf.toml", &PDF_CFG.replace("[mc]\nseed = 7\n", ""));
    let out = dir.path().join("a.csv");
    let o = bin()
        .args(["pdf", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env("AERIAL_D2D_SEED", "31337")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = fs::read_to_string(manifest_of(&out)).unwrap();
    assert!(manifest.contains("seed = 31337"), "{manifest}");
}

#[test]
fn quadrature_failure_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let text = format!("{PDF_CFG}\n[numerics]\nabs_tol = 1e-300\nrel_tol = 1e-300\nmax_subdivisions = 1\n");
    let cfg = write(&dir, "strict.toml", &text);
    let out = dir.path().join("a.csv");
    let o = run(&["pdf", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn sweep_output_shape_and_replay() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "sweep.toml", SWEEP_CFG);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let o = run(&["pd2d-sweep", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&a).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "L_m,p_d2d_analytic,p_d2d_mc_mean,p_d2d_mc_stderr,d_bar_th_m,r_bar_th_m,scheme,environment,rss_th_dbm"
    );
    // 2 environments × 2 schemes × 2 thresholds × 4 altitudes
    assert_eq!(text.lines().count(), 1 + 32);

    let mut rsss: std::collections::BTreeMap<(String, String), Vec<String>> = Default::default();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert!(!f[2].is_empty() && !f[3].is_empty());
        if f[6] == "RSSS" {
            rsss.entry((f[7].to_owned(), f[8].to_owned())).or_default().push(f[1].to_owned());
        }
    }
    assert_eq!(rsss.len(), 4);
    for values in rsss.values() {
        assert!(values.iter().all(|v| v == &values[0]), "{values:?}");
    }

    let manifest = manifest_of(&a);
    let o = run(&["pd2d-sweep", "--config", manifest.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn analytic_only_sweep_leaves_mc_columns_empty() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "sweep.toml", SWEEP_CFG);
    let a = dir.path().join("a.csv");
    let o = run(&["pd2d-sweep", "--analytic-only", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for line in fs::read_to_string(&a).unwrap().lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert!(f[2].is_empty() && f[3].is_empty());
    }
}

#[test]
fn sweep_requires_its_sections() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "pdf.toml", PDF_CFG);
    let out = dir.path().join("a.csv");
    let o = run(&["pd2d-sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("env"), "{}", stderr(&o));
}

#[test]
fn eval_expressions() {
    let o = run(&["eval", "mhcp_density", "lambda_parent=2e-5", "delta=100"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("1.484953"), "{}", stdout(&o));

    let o = run(&["eval", "plos", "h=0", "L=100", "env=high_rise_urban"]);
    assert!(stdout(&o).starts_with("8.4777"), "{}", stdout(&o));

    let o = run(&[
        "eval", "p_d2d", "scheme=RSSS", "R=500", "f_c=2.5e9", "env=urban", "p_dd_dbm=23", "rss_th_dbm=-120",
    ]);
    assert!(stdout(&o).starts_with("1.000000000e0"), "{}", stdout(&o));

    let o = run(&[
        "eval", "avg_dth", "L=500", "f_c=2.5e9", "env=high_rise_urban", "p_dd_dbm=23", "p_ul_dbm=0", "p_dl_dbm=0",
        "lambda_retained=1e-4",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).trim_end().ends_with(" m"));

    let o = run(&["eval", "atg_attenuation", "h=0", "L=100", "f_c=2.5e9", "env=high_rise_urban"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn eval_lists_missing_keys() {
    let o = run(&["eval", "p_d2d", "scheme=TDDS", "R=500"]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    for k in ["f_c", "p_dd_dbm", "rss_th_dbm", "env", "p", "L", "p_ul_dbm", "p_dl_dbm"] {
        assert!(msg.contains(k), "{msg}");
    }
}
