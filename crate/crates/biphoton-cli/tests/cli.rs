//! End-to-end checks of the binary: exit codes, CSV schemas, flag
//! precedence, and the analysis lines on stdout.

use std::path::Path;
use std::process::{Command, Output};

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biphoton"))
        .args(args)
        .env("BIPHOTON_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn read_csv(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    let mut lines = text.lines();
    let header = lines.next().expect("header").to_string();
    let rows = lines
        .map(|line| line.split(',').map(|v| v.parse::<f64>().expect("numeric cell")).collect())
        .collect();
    (header, rows)
}

#[test]
fn usage_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["hom", "--source", "thermal"],
        &["hom", "--source", "distinguishable"],
        &["fringe", "--scan", "1:2"],
        &["packet", "--x1", "500"],
        &["fringe", "--oracle", "--vis-degrade", "0.9"],
        &["hom", "--vis-degrade", "1.5"],
    ];
    for args in cases {
        let out = run_in(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
    let out = Command::new(env!("CARGO_BIN_EXE_biphoton")).arg("warble").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_failures_exit_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["hom", "--out", "/dev/null/nested/hom.csv"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn unknown_or_malformed_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.conf");

    std::fs::write(&config, "volume = 11\n").unwrap();
    let out = run_in(dir.path(), &["hom", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown key"), "{}", stderr(&out));

    std::fs::write(&config, "lambda0 white\n").unwrap();
    let out = run_in(dir.path(), &["hom", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("key=value"), "{}", stderr(&out));

    std::fs::write(&config, "lambda0 = white\n").unwrap();
    let out = run_in(dir.path(), &["hom", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hom_scan_writes_csv_and_fit_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["hom"]);
    assert!(out.status.success(), "{}", stderr(&out));

    let (header, rows) = read_csv(&dir.path().join("hom_spdc.csv"));
    assert_eq!(header, "axis_um,rate");
    assert_eq!(rows.len(), 201);
    assert!((rows[0][0] + 150.0).abs() < 1e-9);
    assert!((rows[200][0] - 150.0).abs() < 1e-9);
    let center = &rows[100];
    assert_eq!(center[1], 0.0, "rate vanishes at zero separation");

    let text = stdout(&out);
    assert!(text.contains("dip fit"), "{text}");
    assert!(text.contains("visibility 1.0000"), "{text}");

    let raw = std::fs::read_to_string(dir.path().join("hom_spdc.csv")).unwrap();
    assert!(raw.lines().nth(1).unwrap().contains('e'), "scientific notation expected");
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for path in [&first, &second] {
        let out = run_in(dir.path(), &["hom", "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.conf");
    std::fs::write(&config, "lambda0 = 900 # pushed off the default\n").unwrap();

    let defaults = dir.path().join("defaults.csv");
    let out = run_in(dir.path(), &["hom", "--out", defaults.to_str().unwrap()]);
    assert!(out.status.success());

    let configured = dir.path().join("configured.csv");
    let out = run_in(
        dir.path(),
        &["hom", "--config", config.to_str().unwrap(), "--out", configured.to_str().unwrap()],
    );
    assert!(out.status.success());
    assert_ne!(
        std::fs::read(&defaults).unwrap(),
        std::fs::read(&configured).unwrap(),
        "config must take effect"
    );

    let overridden = dir.path().join("overridden.csv");
    let out = run_in(
        dir.path(),
        &[
            "hom",
            "--config",
            config.to_str().unwrap(),
            "--lambda0",
            "810",
            "--out",
            overridden.to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(&defaults).unwrap(),
        std::fs::read(&overridden).unwrap(),
        "flag must beat config"
    );
}

#[test]
fn fringe_default_emits_four_panels() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["fringe"]);
    assert!(out.status.success(), "{}", stderr(&out));
    for name in [
        "fringe_spdc_x1_0um.csv",
        "fringe_spdc_x1_62um.csv",
        "fringe_spdc_x1_2800um.csv",
        "fringe_spdc_x1_5700um.csv",
    ] {
        let (header, rows) = read_csv(&dir.path().join(name));
        assert_eq!(header, "axis_um,rate");
        assert_eq!(rows.len(), 193, "{name}");
    }
    let text = stdout(&out);
    assert_eq!(text.matches("period").count(), 4, "{text}");
    assert!(text.contains("visibility 1.0000"), "{text}");
}

#[test]
fn fringe_single_panel_with_oracle_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["fringe", "--x1", "62um", "--scan", "-0.405:0.405:0.0253125", "--oracle"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("fringe_spdc_x1_62um.csv"));
    assert_eq!(header, "axis_um,rate,oracle_rate");
    assert_eq!(rows.len(), 33);
    for row in &rows {
        assert_eq!(row.len(), 3);
        let err = (row[1] - row[2]).abs() / row[1].abs().max(1.0);
        assert!(err <= 1e-3, "closed {} vs oracle {}", row[1], row[2]);
    }
}

#[test]
fn packet_reports_envelope_and_side_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["packet", "--x1", "500um", "--pump-fwhm", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("envelope: side_peaks"), "{text}");
    assert!(text.contains("side peaks: -500"), "{text}");

    let (header, rows) = read_csv(&dir.path().join("packet_spdc_x1_500um_envelope.csv"));
    assert_eq!(header, "axis_um,upper,lower");
    assert!(rows.len() > 100);

    let out = run_in(dir.path(), &["packet", "--pump-fwhm", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("envelope: symmetric_gaussian"), "{}", stdout(&out));
}

// The 200 μm arm offset with a 2 nm pump leaves the hump pair connected by a
// raised valley. Getting this right requires the pump bandwidth conversion to
// use the pump wavelength; an overly broad pump drops the valley to the
// baseline and misreads the envelope as detached side peaks.
#[test]
fn packet_valley_height_tracks_pump_bandwidth() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["packet", "--x1", "200um", "--pump-fwhm", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("envelope: double_hump_single_dip"), "{}", stdout(&out));

    let (_, rows) = read_csv(&dir.path().join("packet_spdc_x1_200um_envelope.csv"));
    let valley = rows
        .iter()
        .filter(|r| r[0] >= 50.0 && r[0] <= 150.0)
        .map(|r| r[1])
        .fold(f64::INFINITY, f64::min);
    assert!((valley - 1.0216).abs() < 0.01, "valley height {valley}");
}

#[test]
fn oracle_check_writes_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["oracle-check", "--points", "2", "--seed", "7"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("[PASS] pair-coincidence"), "{text}");

    let report = std::fs::read_to_string(dir.path().join("oracle_check.txt")).unwrap();
    assert!(report.contains("singles-flatness"), "{report}");
}
