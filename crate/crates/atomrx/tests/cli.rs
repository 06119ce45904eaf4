//! Integration tests for the `atomrx` binary: exit codes, artifact formats,
//! and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_atomrx"))
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("atomrx-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .args(["--out-dir", dir.to_str().unwrap()])
        .output()
        .expect("binary should spawn")
}

/// Small, fast scenario for determinism and format checks.
const SMALL: &str = "\
name = small
[atomic]
omega_p_hz = 1.0e6
omega_c_hz = 5.0e6
dipole_moment_ea0 = 2000.0
deph_13_hz = 200.0e3
deph_14_hz = 200.0e3
deph_23_hz = 200.0e3
deph_24_hz = 200.0e3
deph_34_hz = 200.0e3
[heterodyne]
offset_hz = 50.0e3
e_sig_v_per_m = 1.0e-4
sample_rate_hz = 400.0e3
duration_s = 0.25
noise_from_floor = false
noise_rms_v_per_m = 1.0e-3
seed = 5
rbw_hz = 50.0
[output]
csv = small.csv
summary = small.json
";

#[test]
fn usage_error_without_scenario() {
    let out = bin().arg("link-budget").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_scenario_file_is_io_error() {
    let out = bin()
        .args(["link-budget", "/no/such/file.scenario"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn validation_error_exits_2() {
    let dir = temp_dir("validation");
    let path = dir.join("bad.scenario");
    std::fs::write(
        &path,
        SMALL.replace("omega_p_hz = 1.0e6", "omega_p_hz = -3.0"),
    )
    .unwrap();
    let out = run_in(&dir, &["link-budget", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("atomic.omega_p_hz"), "{stderr}");
}

#[test]
fn solver_error_exits_3() {
    // All decay rates zero: no unique steady state, so the sweep fails.
    let dir = temp_dir("solver");
    let path = dir.join("nodecay.scenario");
    let text = SMALL.replace(
        "dipole_moment_ea0 = 2000.0",
        "dipole_moment_ea0 = 2000.0\ngamma_21_hz = 0.0\ngamma_32_hz = 0.0\ngamma_43_hz = 0.0",
    );
    std::fs::write(&path, text).unwrap();
    let out = run_in(&dir, &["eit-spectrum", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn no_splitting_exits_4() {
    // Field-free sweep has a single peak, so at-infer cannot find a doublet.
    let dir = temp_dir("nosplit");
    let path = dir.join("fieldfree.scenario");
    std::fs::write(&path, SMALL).unwrap();
    let out = run_in(&dir, &["at-infer", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn beacon_scenario_budget_checkpoints() {
    let dir = temp_dir("budget");
    let scenario = scenarios_dir().join("beacon_geo.scenario");
    let out = run_in(&dir, &["link-budget", scenario.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("beacon_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["version"], 1);
    let budget = &summary["budget"];
    let checkpoints = budget["checkpoints_dbm"].as_array().unwrap();
    let after = |label: &str| -> f64 {
        checkpoints
            .iter()
            .find(|c| c[0] == label)
            .unwrap_or_else(|| panic!("no checkpoint {label}"))[1]
            .as_f64()
            .unwrap()
    };
    assert!((after("path-loss") + 148.22).abs() < 0.5);
    assert!((budget["rx_power_dbm"].as_f64().unwrap() + 99.68).abs() < 0.5);
    assert!((budget["predicted_snr_db"].as_f64().unwrap() - 28.32).abs() < 0.5);
}

#[test]
fn beacon_sim_summary_reports_predicted_and_measured_snr() {
    let dir = temp_dir("beacon-sim");
    let scenario = scenarios_dir().join("beacon_geo.scenario");
    let out = run_in(&dir, &["beacon-sim", scenario.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("beacon_summary.json")).unwrap())
            .unwrap();
    let het = &summary["heterodyne"];
    let predicted = het["predicted_snr_db"].as_f64().unwrap();
    let measured = het["measured_snr_db"].as_f64().unwrap();
    assert!((predicted - 28.32).abs() < 0.5, "predicted {predicted}");
    assert!(
        (measured - predicted).abs() <= 3.0,
        "measured {measured} vs predicted {predicted}"
    );
    assert_eq!(het["reported_snr_db"].as_f64(), Some(24.0));

    // The spectrum CSV carries the analysis RBW in its header.
    let csv = std::fs::read_to_string(dir.join("beacon_psd.csv")).unwrap();
    assert!(csv.starts_with("# axis=baseband-frequency unit=dBm rbw=1\n"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir_a = temp_dir("det-a");
    let dir_b = temp_dir("det-b");
    let path = dir_a.join("small.scenario");
    std::fs::write(&path, SMALL).unwrap();

    let out_a = run_in(&dir_a, &["heterodyne", path.to_str().unwrap()]);
    assert_eq!(
        out_a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out_a.stderr)
    );
    let out_b = run_in(&dir_b, &["heterodyne", path.to_str().unwrap()]);
    assert_eq!(out_b.status.code(), Some(0));

    let csv_a = std::fs::read(dir_a.join("small.csv")).unwrap();
    let csv_b = std::fs::read(dir_b.join("small.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "CSV outputs differ between identical runs");
    let sum_a = std::fs::read(dir_a.join("small.json")).unwrap();
    let sum_b = std::fs::read(dir_b.join("small.json")).unwrap();
    assert_eq!(sum_a, sum_b, "summaries differ between identical runs");
}

#[test]
fn csv_header_and_rows_are_well_formed() {
    let dir = temp_dir("csv");
    let path = dir.join("small.scenario");
    std::fs::write(&path, SMALL).unwrap();
    let out = run_in(&dir, &["heterodyne", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let csv = std::fs::read_to_string(dir.join("small.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert_eq!(header, "# axis=baseband-frequency unit=dBm rbw=50");
    let mut prev_x = f64::NEG_INFINITY;
    let mut rows = 0;
    for line in lines {
        let (x, y) = line.split_once(',').expect("x,y row");
        let x: f64 = x.parse().unwrap();
        let y: f64 = y.parse().unwrap();
        assert!(x > prev_x, "x must be strictly increasing");
        assert!(y.is_finite());
        prev_x = x;
        rows += 1;
    }
    // 400 kHz / 50 Hz segment -> 4001 one-sided bins.
    assert_eq!(rows, 4001);
}

#[test]
fn summary_scenario_echo_round_trips() {
    let dir = temp_dir("echo");
    let path = dir.join("small.scenario");
    std::fs::write(&path, SMALL).unwrap();
    let out = run_in(&dir, &["heterodyne", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let parsed = atomrx::scenario::parse_scenario(SMALL).unwrap();
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("small.json")).unwrap()).unwrap();
    let echoed: atomrx::scenario::Scenario =
        serde_json::from_value(summary["scenario"].clone()).unwrap();
    assert_eq!(
        parsed, echoed,
        "scenario echo must re-parse to an equal value"
    );
}

#[test]
fn eit_spectrum_writes_detuning_axis() {
    let dir = temp_dir("eit");
    let scenario = scenarios_dir().join("eit_at_resonant.scenario");
    let out = run_in(&dir, &["eit-spectrum", scenario.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("eit_at_resonant.csv")).unwrap();
    assert!(csv.starts_with("# axis=coupling-detuning unit=transmission rbw=0\n"));
}
