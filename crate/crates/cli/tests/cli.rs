use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const HEADER: &str = "scenario,case,method,warehouse,metric,value";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_echelon-rq"))
}

fn base_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/base.toml")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Base config restricted to a two-case grid.
fn small_grid_config(dir: &Path) -> PathBuf {
    let mut text = std::fs::read_to_string(base_config()).unwrap();
    text.push_str("\n[[variation]]\nparameter = \"q_local\"\nkind = \"multiplicative\"\nvalues = [2.0]\n");
    let path = dir.join("small.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().map(str::to_owned).collect()
}

#[test]
fn calibrate_writes_results_to_stdout() {
    let o = run(&["calibrate", "--central-target", "0.95", "--method", "nb"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().next(), Some(HEADER));
    assert!(out.lines().skip(1).all(|l| l.split(',').nth(2) == Some("nb")));
    assert!(out.lines().any(|l| l.starts_with("custom,base,nb,1,")));
}

#[test]
fn simulate_writes_results_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim.csv");
    let o = run(&[
        "simulate", "--config", base_config().to_str().unwrap(), "--central-R", "1999", "--method", "bf,nb",
        "--replications", "2", "--horizon", "300", "--warmup", "50", "--seed", "3", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = lines(&out);
    assert_eq!(rows[0], HEADER);
    for m in ["bf", "nb"] {
        assert!(rows.iter().any(|l| l.split(',').nth(2) == Some(m)));
    }
}

#[test]
fn experiment_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_grid_config(dir.path());
    let out = dir.path().join("exp.csv");
    let o = run(&[
        "experiment", "--config", cfg.to_str().unwrap(), "--scenario", "medium_high", "--method", "nb",
        "--replications", "2", "--horizon", "300", "--warmup", "50", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = lines(&out);
    assert_eq!(rows[0], HEADER);
    assert!(rows.iter().all(|l| l == HEADER || l.starts_with("medium_high,")));

    let report = dir.path().join("report.txt");
    let o = run(&["report", "--results", out.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!std::fs::read_to_string(report).unwrap().is_empty());
}

#[test]
fn partial_failures_exit_with_one_and_keep_other_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_grid_config(dir.path());
    let out = dir.path().join("exp.csv");
    let o = run(&[
        "experiment", "--config", cfg.to_str().unwrap(), "--central-R", "-100", "--method", "kksl,nb",
        "--replications", "2", "--horizon", "300", "--warmup", "50", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("method=kksl"));
    assert!(lines(&out).iter().any(|l| l.split(',').nth(2) == Some("nb")));
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[central]\norder_quantity = \"many\"\n").unwrap();
    let missing = dir.path().join("missing.toml");
    let cases: Vec<Vec<&str>> = vec![
        vec!["calibrate", "--config", missing.to_str().unwrap(), "--central-target", "0.9"],
        vec!["calibrate", "--config", bad.to_str().unwrap(), "--central-target", "0.9"],
        vec!["calibrate", "--central-target", "1.5"],
        vec!["calibrate", "--scenario", "nowhere"],
        vec!["calibrate"],
        vec!["simulate", "--central-R", "1999", "--horizon", "10", "--warmup", "10"],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    // Argument parsing errors use the same code.
    assert_eq!(code(&run(&["calibrate", "--method", "metric"])), 2);
}

#[test]
fn trace_mode_replays_and_recalibrates() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let mut text = String::from("day,warehouse_id,quantity\n");
    for day in 0..400 {
        for w in 1..=8 {
            if (day + w) % 2 == 0 {
                text.push_str(&format!("{day},{w},{}\n", 1 + (day * w) % 5));
            }
        }
    }
    std::fs::write(&trace, text).unwrap();
    let out = dir.path().join("trace_out.csv");
    let args = [
        "simulate", "--central-R", "1999", "--method", "nb", "--demand-trace", trace.to_str().unwrap(),
        "--recalibrate-every", "90", "--horizon", "400", "--warmup", "50", "--replications", "1",
        "--out", out.to_str().unwrap(),
    ];
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = lines(&out);
    assert!(rows.iter().any(|l| l.starts_with("custom,trace,nb,")));
    assert!(rows.iter().any(|l| l.starts_with("custom,trace_day_90,nb,")));

    // A trace shorter than the horizon is a configuration error.
    let mut short = args.to_vec();
    short[11] = "1000";
    assert_eq!(code(&run(&short)), 2);
}
