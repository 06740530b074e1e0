//! End-to-end checks of the command-line surface: exit codes, file
//! schemas, flag/file precedence, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn sqphase(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqphase"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value_of(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} ")))
        .unwrap_or_else(|| panic!("no '{key}' line in:\n{text}"))
        .parse()
        .unwrap()
}

#[test]
fn convert_reports_state_parameters() {
    let dir = tempdir().unwrap();
    let out = sqphase(
        &["convert", "--squeezing-db", "3.21", "--antisqueezing-db", "3.41"],
        dir.path(),
    );
    let text = stdout(&out);
    assert!((value_of(&text, "r") - 0.369_564_907_4).abs() < 1e-9);
    assert!((value_of(&text, "r_prime") - 0.023_025_850_9).abs() < 1e-9);
    assert!((value_of(&text, "purity") - 0.977).abs() < 0.002);
    assert!((value_of(&text, "mean_photon") - 0.167_583_55).abs() < 1e-7);
}

#[test]
fn convert_rejects_inverted_db_pair() {
    let dir = tempdir().unwrap();
    let out = sqphase(
        &["convert", "--squeezing-db", "3.0", "--antisqueezing-db", "2.0"],
        dir.path(),
    );
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.lines().any(|l| l.starts_with("error: ")), "stderr: {err}");
}

#[test]
fn interval_prints_window() {
    let dir = tempdir().unwrap();
    let out = sqphase(&["interval", "--r", "0.37"], dir.path());
    let text = stdout(&out);
    assert!(text.contains("empty false"));
    let width = value_of(&text, "delta_theta");
    let lo = value_of(&text, "theta_low");
    let hi = value_of(&text, "theta_high");
    assert!((width - (hi - lo)).abs() < 1e-12);
    assert!(width > 0.0);
}

#[test]
fn bounds_emits_csv_rows_in_theta_order() {
    let dir = tempdir().unwrap();
    let out = sqphase(
        &[
            "bounds", "--r", "0.37", "--n-meas", "1000", "--theta", "0.2,0.4,0.6",
        ],
        dir.path(),
    );
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# meta: "));
    assert_eq!(lines[1], "theta,fisher,inv_NF,sql,ocrb,qcrb");
    assert_eq!(lines.len(), 5);
    let first: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
    assert_eq!(first, 0.2);
}

#[test]
fn posterior_writes_normalized_curve_and_meta_round_trips() {
    let dir = tempdir().unwrap();
    let config = r#"{"state": {"r": 0.37, "r_prime": 0.0},
        "run": {"theta": 0.4, "n_samples": 300, "seed": 11, "grid_points": 256},
        "out": {"path": "post.csv"}}"#;
    std::fs::write(dir.path().join("cfg.json"), config).unwrap();
    let out = sqphase(&["posterior", "--config", "cfg.json"], dir.path());
    assert!(out.status.success());

    let text = std::fs::read_to_string(dir.path().join("post.csv")).unwrap();
    let mut lines = text.lines();
    let meta = lines.next().unwrap();
    let cfg = sqphase::report::parse_meta_line(meta).unwrap();
    assert_eq!(cfg.seed, 11);
    assert_eq!(cfg.n_samples, 300);
    assert_eq!(lines.next().unwrap(), "theta,density");

    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (t, d) = l.split_once(',').unwrap();
            (t.parse().unwrap(), d.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 256);
    // trapezoidal mass of the emitted curve is 1
    let step = rows[1].0 - rows[0].0;
    let mass: f64 = step
        * (0.5 * rows[0].1
            + rows[1..255].iter().map(|r| r.1).sum::<f64>()
            + 0.5 * rows[255].1);
    assert!((mass - 1.0).abs() < 1e-9, "mass {mass}");
}

#[test]
fn posterior_curve_family_and_figure() {
    let dir = tempdir().unwrap();
    let out = sqphase(
        &[
            "posterior", "--r", "0.37", "--theta", "0.4", "--seed", "3",
            "--grid-points", "256", "--curves", "100,300,500,1000",
            "--out", "fig.csv", "--plot",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for n in [100, 300, 500, 1000] {
        assert!(dir.path().join(format!("fig_n{n}.csv")).exists());
    }
    let svg = std::fs::read_to_string(dir.path().join("fig.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);
}

#[test]
fn simulate_writes_trials_and_prints_aggregate() {
    let dir = tempdir().unwrap();
    let out = sqphase(
        &[
            "simulate", "--r", "0.37", "--theta", "0.4", "--seed", "2",
            "--n-samples", "200", "--repetitions", "4", "--grid-points", "256",
            "--out", "trials.csv",
        ],
        dir.path(),
    );
    let text = stdout(&out);
    assert!(value_of(&text, "emp_var") > 0.0);
    let csv = std::fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "theta,rep,map,post_var");
    assert_eq!(csv.lines().count(), 2 + 4);
}

#[test]
fn sweep_is_byte_deterministic_across_runs_and_modes() {
    let dir = tempdir().unwrap();
    let config = r#"{"state": {"squeezing_db": 3.21, "antisqueezing_db": 3.41},
        "run": {"thetas": [0.2, 0.4, 0.6], "n_samples": 200, "repetitions": 3,
                "seed": 5, "grid_points": 256},
        "out": {"path": "run.csv"}}"#;
    std::fs::write(dir.path().join("cfg.json"), config).unwrap();

    let mut captures: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    for args in [
        vec!["sweep", "--config", "cfg.json"],
        vec!["sweep", "--config", "cfg.json"],
        vec!["--serial", "sweep", "--config", "cfg.json"],
    ] {
        let out = sqphase(&args, dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        captures.push((
            std::fs::read(dir.path().join("run.trials.csv")).unwrap(),
            std::fs::read(dir.path().join("run.aggregate.csv")).unwrap(),
        ));
    }
    assert_eq!(captures[0], captures[1], "second run differs");
    assert_eq!(captures[0], captures[2], "serial run differs");

    let agg = String::from_utf8(captures[0].1.clone()).unwrap();
    assert_eq!(
        agg.lines().nth(1).unwrap(),
        "theta,emp_var,mean_post_var,stderr,sql,ocrb,qcrb"
    );
    assert_eq!(agg.lines().count(), 2 + 3);
}

#[test]
fn sweep_without_out_path_fails() {
    let dir = tempdir().unwrap();
    let out = sqphase(
        &["sweep", "--r", "0.37", "--thetas", "0.2,0.4", "--seed", "1"],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error: config:"));
}

#[test]
fn purity_scan_default_ladder_and_plot() {
    let dir = tempdir().unwrap();
    let out = sqphase(
        &[
            "purity-scan", "--seed", "8", "--n-samples", "200", "--repetitions", "3",
            "--grid-points", "256", "--out", "scan.csv", "--plot",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert_eq!(
        csv.lines().nth(1).unwrap(),
        "purity,r,r_prime,delta_theta_theory,delta_theta_empirical"
    );
    assert_eq!(csv.lines().count(), 2 + 4);
    // rows arrive in ladder order: ascending purity, increasing window
    let widths: Vec<f64> = csv
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(widths.windows(2).all(|w| w[0] < w[1]), "{widths:?}");
    let svg = std::fs::read_to_string(dir.path().join("scan.svg")).unwrap();
    assert_eq!(svg.matches("<circle").count(), 4);
}

#[test]
fn config_errors_are_reported_one_per_line() {
    let dir = tempdir().unwrap();
    let config = r#"{"state": {"r": 0.37, "squeezing_db": 3.21},
        "run": {"theta": 2.0, "n_samples": 0, "seed": 1}}"#;
    std::fs::write(dir.path().join("bad.json"), config).unwrap();
    let out = sqphase(&["posterior", "--config", "bad.json"], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    let error_lines: Vec<&str> = err.lines().filter(|l| l.starts_with("error: config:")).collect();
    assert!(error_lines.len() >= 3, "expected one line per problem:\n{err}");
    assert!(err.contains("[0, pi/2]"));
}

#[test]
fn unknown_flags_are_rejected() {
    let dir = tempdir().unwrap();
    let out = sqphase(&["bounds", "--r", "0.37", "--n-meas", "10", "--bogus"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn flags_override_config_file() {
    let dir = tempdir().unwrap();
    let config = r#"{"state": {"r": 0.37, "r_prime": 0.0},
        "run": {"theta": 0.4, "n_samples": 200, "seed": 1, "grid_points": 256},
        "out": {"path": "a.csv"}}"#;
    std::fs::write(dir.path().join("cfg.json"), config).unwrap();
    let out = sqphase(
        &[
            "posterior", "--config", "cfg.json", "--seed", "42", "--out", "b.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("a.csv").exists());
    let text = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let cfg = sqphase::report::parse_meta_line(text.lines().next().unwrap()).unwrap();
    assert_eq!(cfg.seed, 42);
    assert_eq!(cfg.n_samples, 200);
    assert_eq!(cfg.out_path.as_deref(), Some("b.csv"));
}

#[test]
fn sample_record_csv_round_trips_through_files() {
    let dir = tempdir().unwrap();
    let s = sqphase::state::SqueezedThermalState::from_db(3.21, 3.41).unwrap();
    let set = sqphase::measurement::sample_homodyne(&s, 0.4, 100, 17).unwrap();
    let path = dir.path().join("samples.csv");
    set.write_csv(&path).unwrap();
    let back = sqphase::measurement::SampleSet::read_csv(&path).unwrap();
    assert_eq!(set, back);
}
