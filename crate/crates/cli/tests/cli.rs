use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn lpns(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpns")).args(args).output().expect("spawn lpns")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn beltrami_config(dir: &Path, t_end: f64, extra: &str) -> std::path::PathBuf {
    let out = dir.join("out");
    let text = format!(
        r#"
[grid]
n = 16
[physics]
nu = 0.05
[time]
dt = 0.01
t_end = {t_end}
[initial]
kind = "beltrami"
xi = [1, 1, 0]
[output]
directory = "{}"
{extra}
"#,
        out.display()
    );
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn partition_check_passes() {
    let tmp = TempDir::new().unwrap();
    let o = lpns(&["verify", "--checks", "partition", "--n", "32", "--out", path(tmp.path())]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS partition"));
    let csv = fs::read_to_string(tmp.path().join("checks.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn verify_all_is_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let o = lpns(&["verify", "--checks", "all", "--seed", "42", "--samples", "2", "--n", "16", "--out", path(d.path())]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
    }
    for f in ["checks.csv", "checks_metadata.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn bernstein_rejects_decreasing_exponent() {
    let tmp = TempDir::new().unwrap();
    let o = lpns(&["verify", "--checks", "bernstein", "--q", "4", "--q-prime", "2", "--out", path(tmp.path())]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("q_prime"));
}

#[test]
fn unknown_check_is_a_usage_error() {
    let o = lpns(&["verify", "--checks", "transform,nonsense"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn beltrami_simulation_tracks_closed_form() {
    let tmp = TempDir::new().unwrap();
    let cfg = beltrami_config(tmp.path(), 0.2, "");
    let o = lpns(&["simulate", "--config", path(&cfg)]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o).lines().find(|l| l.starts_with("beltrami")).unwrap().to_string();
    let err: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(err < 1e-10, "{line}");
    let energy = fs::read_to_string(tmp.path().join("out/energy.csv")).unwrap();
    assert_eq!(energy.lines().count(), 22);
    assert!(!tmp.path().join("out/series.csv").exists());
}

#[test]
fn zero_length_run_writes_one_row() {
    let tmp = TempDir::new().unwrap();
    let cfg = beltrami_config(tmp.path(), 0.0, "");
    let o = lpns(&["simulate", "--config", path(&cfg)]);
    assert_eq!(code(&o), 0);
    for f in ["energy.csv", "history.csv"] {
        let text = fs::read_to_string(tmp.path().join("out").join(f)).unwrap();
        assert_eq!(text.lines().count(), 2, "{f}");
    }
}

#[test]
fn monitor_attaches_series() {
    let tmp = TempDir::new().unwrap();
    let cfg = beltrami_config(tmp.path(), 0.05, "");
    let o = lpns(&["monitor", "--config", path(&cfg)]);
    assert_eq!(code(&o), 0);
    let mut r = csv::Reader::from_path(tmp.path().join("out/series.csv")).unwrap();
    assert_eq!(r.headers().unwrap().get(1), Some("series_Bk_total"));
    // every 10 steps plus the last
    assert_eq!(r.records().count(), 2);
}

#[test]
fn resume_is_bit_exact() {
    let tmp = TempDir::new().unwrap();
    let cfg = beltrami_config(tmp.path(), 0.2, "checkpoint_interval = 10");
    assert_eq!(code(&lpns(&["simulate", "--config", path(&cfg)])), 0);
    let ck = tmp.path().join("out/checkpoints");
    let resumed = tmp.path().join("resumed");
    let o = lpns(&[
        "simulate",
        "--config",
        path(&cfg),
        "--out",
        path(&resumed),
        "--resume",
        path(&ck.join("checkpoint_00000010.lpns")),
    ]);
    assert_eq!(code(&o), 0);
    let full = fs::read(ck.join("checkpoint_00000020.lpns")).unwrap();
    let again = fs::read(resumed.join("checkpoints/checkpoint_00000020.lpns")).unwrap();
    assert!(full == again, "resumed final state differs");
    // the resumed history picks up at step 10
    let hist = fs::read_to_string(resumed.join("history.csv")).unwrap();
    assert!(hist.lines().nth(1).unwrap().starts_with("10,"));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = beltrami_config(tmp.path(), 0.2, "colour = \"red\"");
    let o = lpns(&["simulate", "--config", path(&cfg)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
    let o = lpns(&["simulate", "--config", path(&tmp.path().join("missing.toml"))]);
    assert_eq!(code(&o), 2);
}

fn barrier(tmp: &TempDir, args: &[&str]) -> (i32, String, Vec<Vec<f64>>) {
    let mut all = vec!["barrier", "--out", path(tmp.path())];
    all.extend_from_slice(args);
    let o = lpns(&all);
    let rows = csv::Reader::from_path(tmp.path().join("barrier.csv"))
        .map(|mut r| {
            r.records()
                .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect())
                .collect()
        })
        .unwrap_or_default();
    (code(&o), stdout(&o), rows)
}

#[test]
fn barrier_with_zero_epsilon_stays_zero() {
    let tmp = TempDir::new().unwrap();
    let (c, out, rows) = barrier(&tmp, &["--epsilon", "0", "--script-b", "1", "--m", "5"]);
    assert_eq!(c, 0);
    assert!(out.contains("verdict=pass"));
    assert!(rows.iter().all(|r| r[1] == 0.0));
}

#[test]
fn barrier_below_threshold_passes() {
    let tmp = TempDir::new().unwrap();
    let (c, out, rows) = barrier(&tmp, &["--epsilon", "0.05", "--script-b", "1", "--m", "5"]);
    assert_eq!(c, 0, "{out}");
    assert!(out.contains("verdict=pass"));
    let bound = 3.0 * 0.05 * 1f64.exp();
    assert_eq!(rows.len(), 1001);
    assert!(rows.iter().all(|r| r[1] <= bound && (r[2] - bound).abs() < 1e-15));
}

#[test]
fn barrier_rejects_linear_power() {
    let tmp = TempDir::new().unwrap();
    let (c, _, _) = barrier(&tmp, &["--epsilon", "0.05", "--script-b", "1", "--m", "1"]);
    assert_eq!(c, 2);
}

#[test]
fn barrier_blow_up_exits_three() {
    let tmp = TempDir::new().unwrap();
    let (c, out, _) = barrier(&tmp, &["--epsilon", "0.5", "--script-b", "3", "--m", "5"]);
    assert_eq!(c, 3);
    assert!(out.contains("hypothesis_failed"));
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        lpns_cli::config::RunConfig::load(&p).unwrap_or_else(|e| panic!("{e}"));
    }
}
