//! End-to-end checks of the `ptbands` binary: format contracts, exit
//! codes, configuration precedence, round-trips, and determinism.

use ptbands_cli::output::{fmt15, parse_csv};
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptbands"))
        .args(args)
        .output()
        .expect("binary must run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

fn band_rows(csv: &str) -> Vec<Vec<String>> {
    let (header, rows) = parse_csv(csv).unwrap();
    assert_eq!(header[0], "kind");
    rows.into_iter().filter(|r| r[0] == "band").collect()
}

fn gap_rows(csv: &str) -> Vec<Vec<String>> {
    let (_, rows) = parse_csv(csv).unwrap();
    rows.into_iter().filter(|r| r[0] == "gap").collect()
}

// -------------------------------------------------------------- bands

#[test]
fn bands_isolated_well() {
    let out = run(&["bands", "--l", "1", "--alpha", "8", "--a", "1", "--emin", "-40", "--emax", "0"]);
    assert_eq!(code(&out), 0);
    let bands = band_rows(&stdout(&out));
    assert_eq!(bands.len(), 1);
    let (lo, hi): (f64, f64) = (bands[0][2].parse().unwrap(), bands[0][3].parse().unwrap());
    let center = 0.5 * (lo + hi);
    assert!((center + 32.0).abs() < 0.01 * 32.0, "center {center}");
}

#[test]
fn bands_two_wells() {
    let out = run(&["bands", "--l", "2", "--alpha", "4", "--a", "1", "--emin", "-40", "--emax", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(band_rows(&stdout(&out)).len(), 2);
}

#[test]
fn bands_free_limit_has_no_gaps() {
    let out = run(&[
        "bands", "--l", "1", "--alpha", "1e-6", "--a", "1", "--emin", "0.1", "--emax", "50",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(gap_rows(&stdout(&out)).len(), 0);
    assert_eq!(band_rows(&stdout(&out)).len(), 1);
}

#[test]
fn bands_incomplete_scan_exit_code() {
    // α·a = 30: the band is narrower than f64 resolution at E = -450
    let args =
        ["bands", "--l", "1", "--alpha", "30", "--a", "1", "--emin", "-460", "--emax", "-440"];
    let out = run(&args);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("incomplete scan"));
    let mut forced = args.to_vec();
    forced.push("--force");
    let out = run(&forced);
    assert_eq!(code(&out), 0);
    assert_eq!(band_rows(&stdout(&out)).len(), 1);
}

/// Determinism: identical configuration produces byte-identical files.
#[test]
fn acceptance_9_bands_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("run1.csv");
    let p2 = dir.path().join("run2.csv");
    for p in [&p1, &p2] {
        let out = run(&[
            "bands", "--l", "2", "--alpha", "2", "--a", "1", "--emin", "-10", "--emax", "5",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let b1 = std::fs::read(&p1).unwrap();
    let b2 = std::fs::read(&p2).unwrap();
    assert!(!b1.is_empty());
    assert_eq!(b1, b2, "band files must be byte-identical across runs");

    // same for JSON output
    let j1 = dir.path().join("run1.json");
    let j2 = dir.path().join("run2.json");
    for p in [&j1, &j2] {
        let out = run(&[
            "bands", "--l", "1", "--alpha", "2.3", "--a", "1", "--emin", "0.01", "--emax", "40",
            "--format", "json", "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(std::fs::read(&j1).unwrap(), std::fs::read(&j2).unwrap());
    println!("ACCEPTANCE 9 PASS: byte-identical band files across repeated runs (csv and json)");
}

#[test]
fn bands_csv_round_trips_and_json_parses() {
    let out = run(&["bands", "--l", "2", "--alpha", "2", "--a", "1", "--emin", "-10", "--emax", "0"]);
    assert_eq!(code(&out), 0);
    for row in band_rows(&stdout(&out)) {
        for field in &row[2..5] {
            let x: f64 = field.parse().unwrap();
            assert_eq!(&fmt15(x), field, "15-digit round trip must be lossless");
        }
    }
    let out = run(&[
        "bands", "--l", "2", "--alpha", "2", "--a", "1", "--emin", "-10", "--emax", "0",
        "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["bands"].as_array().unwrap().len(), 2);
    let lo = v["bands"][0]["e_lo"].as_f64().unwrap();
    assert_eq!(format!("{lo:.16e}").parse::<f64>().unwrap(), lo);
}

// --------------------------------------------------------- dispersion

#[test]
fn dispersion_format_contract() {
    let out = run(&[
        "dispersion", "--l", "1", "--alpha", "2.3", "--a", "1", "--emin", "-1", "--emax", "5",
        "--samples", "25",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("E,k,branch,D,f_paper,in_band\n"), "header contract violated");
    let (header, rows) = parse_csv(&text).unwrap();
    assert_eq!(header, ["E", "k", "branch", "D", "f_paper", "in_band"]);
    assert_eq!(rows.len(), 25);
    // deterministic ascending order, branch labels, k = sqrt(2|E|)
    let mut prev = f64::NEG_INFINITY;
    for r in &rows {
        let e: f64 = r[0].parse().unwrap();
        let k: f64 = r[1].parse().unwrap();
        assert!(e > prev);
        prev = e;
        assert!((k - (2.0 * e.abs()).sqrt()).abs() <= 1e-13 * k.max(1.0));
        match r[2].as_str() {
            "pos" => {
                assert!(e > 0.0);
                assert!(!r[4].is_empty(), "f_paper expected for l=1, E>0");
            }
            "neg" => {
                assert!(e < 0.0);
                assert!(r[4].is_empty(), "no printed formula on the negative branch for l=1");
            }
            "zero" => assert!(e.abs() <= 1e-9),
            other => panic!("bad branch label {other}"),
        }
        assert!(r[5] == "true" || r[5] == "false");
    }
}

#[test]
fn dispersion_free_limit_all_in_band() {
    let out = run(&[
        "dispersion", "--l", "1", "--alpha", "1e-6", "--a", "1", "--emin", "0.1", "--emax", "30",
        "--samples", "60",
    ]);
    assert_eq!(code(&out), 0);
    let (_, rows) = parse_csv(&stdout(&out)).unwrap();
    assert!(rows.iter().all(|r| r[5] == "true"));
}

#[test]
fn dispersion_csv_round_trips_at_15_digits() {
    let out = run(&[
        "dispersion", "--l", "2", "--alpha", "1.7", "--a", "0.8", "--emin", "-3", "--emax", "9",
        "--samples", "40",
    ]);
    let text = stdout(&out);
    let (_, rows) = parse_csv(&text).unwrap();
    for r in rows {
        for field in [&r[0], &r[1], &r[3]] {
            let x: f64 = field.parse().unwrap();
            assert_eq!(&fmt15(x), field.as_str(), "15-digit round trip must be lossless");
        }
    }
}

// ------------------------------------------------------------ spectrum

#[test]
fn spectrum_analytic_levels() {
    let out = run(&["spectrum", "--l", "2", "--alpha", "1"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(header, ["n", "e_analytic", "e_oracle", "abs_diff"]);
    let levels: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(levels.len(), 2);
    assert!((levels[0] + 2.0).abs() < 1e-14);
    assert!((levels[1] + 0.5).abs() < 1e-14);
}

#[test]
fn spectrum_with_oracle_verification() {
    let out = run(&["spectrum", "--l", "1", "--alpha", "2", "--verify"]);
    assert_eq!(code(&out), 0);
    let (_, rows) = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 1);
    let e_analytic: f64 = rows[0][1].parse().unwrap();
    let diff: f64 = rows[0][3].parse().unwrap();
    assert!((e_analytic + 2.0).abs() < 1e-14);
    assert!(diff <= 1e-6, "oracle deviation {diff}");
}

#[test]
fn spectrum_rejects_l_zero() {
    let out = run(&["spectrum", "--l", "0", "--alpha", "1"]);
    assert_eq!(code(&out), 2);
}

// -------------------------------------------------------------- verify

#[test]
fn verify_default_run_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["verify", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).expect("report must be valid JSON");

    for key in ["meta", "params", "checks", "summary"] {
        assert!(v.get(key).is_some(), "missing top-level key {key}");
    }
    let checks = &v["checks"];
    let disc = checks["discriminant_max_abs_diff"].as_f64().unwrap();
    assert!(disc <= 1e-6, "discriminant_max_abs_diff = {disc}");
    assert!(checks["paper_formula_band_membership_agreement"].is_boolean());
    assert!(checks["paper_formula_mismatches"].is_array());
    assert!(checks["paper_formula_crosscheck"]["points"].as_u64().unwrap() > 0);
    assert_eq!(v["summary"]["hard_checks_passed"], serde_json::Value::Bool(true));
}

#[test]
fn verify_json_numbers_round_trip() {
    let out = run(&["verify", "--l", "2", "--alpha", "2", "--samples", "40"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // 17 significant digits reparse to the identical f64
    let x = v["checks"]["discriminant_max_abs_diff"].as_f64().unwrap();
    let text = format!("{x:.16e}");
    assert_eq!(text.parse::<f64>().unwrap(), x);
}

// ------------------------------------------------- config & validation

#[test]
fn config_file_supplies_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# isolated-well scan\nl = 1\nalpha = 8\na = 1\nemin = -40\nemax = 0\n",
    )
    .unwrap();
    let out = run(&["bands", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let bands = band_rows(&stdout(&out));
    let lo: f64 = bands[0][2].parse().unwrap();
    assert!((lo + 32.0).abs() < 0.5, "config-driven run should find the alpha=8 band");

    // --alpha on the command line overrides the file: band moves to -α²/2 = -8
    let out = run(&["bands", "--config", cfg.to_str().unwrap(), "--alpha", "4"]);
    assert_eq!(code(&out), 0);
    let bands = band_rows(&stdout(&out));
    let lo: f64 = bands[0][2].parse().unwrap();
    assert!((lo + 8.0).abs() < 0.5, "flag must override config, got e_lo = {lo}");
}

#[test]
fn config_unknown_key_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "l = 1\nalpha = 1\nwavelength = 3\n").unwrap();
    let out = run(&[
        "bands", "--config", cfg.to_str().unwrap(), "--emin", "-1", "--emax", "1",
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("wavelength"));
}

#[test]
fn usage_errors_exit_2() {
    // missing required parameter
    assert_eq!(code(&run(&["bands", "--alpha", "1", "--emin", "0", "--emax", "1"])), 2);
    // inverted window
    assert_eq!(
        code(&run(&["bands", "--l", "1", "--alpha", "1", "--emin", "5", "--emax", "1"])),
        2
    );
    // bad format token
    assert_eq!(
        code(&run(&[
            "dispersion", "--l", "1", "--alpha", "1", "--emin", "0", "--emax", "1", "--format",
            "xml",
        ])),
        2
    );
    // unknown flag (clap)
    assert_eq!(code(&run(&["bands", "--wibble"])), 2);
    // gnuplot without --out
    assert_eq!(
        code(&run(&[
            "dispersion", "--l", "1", "--alpha", "1", "--emin", "0", "--emax", "1", "--gnuplot",
        ])),
        2
    );
}

#[test]
fn gnuplot_sidecar_references_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("disp.csv");
    let out = run(&[
        "dispersion", "--l", "1", "--alpha", "2.3", "--a", "1", "--emin", "0.1", "--emax", "20",
        "--samples", "50", "--out",
        csv.to_str().unwrap(),
        "--gnuplot",
    ]);
    assert_eq!(code(&out), 0);
    let gp = csv.with_extension("gp");
    assert!(Path::new(&gp).exists());
    let script = std::fs::read_to_string(&gp).unwrap();
    assert!(script.contains("disp.csv"));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("E,k,branch"));
}
