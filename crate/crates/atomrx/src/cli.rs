//! Command runner behind the `atomrx` binary.
//!
//! Every subcommand takes a scenario file, computes its piece of the chain,
//! and writes a CSV curve plus a JSON run summary. Identical inputs and seed
//! produce byte-identical artifacts. Exit codes: 0 success, 2 usage/parse/
//! validation, 3 solver, 4 signal analysis, 5 I/O.

use crate::atomic::SolverError;
use crate::eit::eit_spectrum;
use crate::heterodyne::{gaussian_noise, square_mod_sidebands, HeterodyneReceiver, ToneSpec};
use crate::inference::{
    field_from_splitting, fit_calibration, sensitivity_report, splitting_from_spectrum,
    InferenceError,
};
use crate::link::{dbm_to_watts, LinkBudget, LinkError};
use crate::psd::{measure_snr, power_spectrum, DspError};
use crate::scenario::{parse_scenario, Scenario, ScenarioError};
use crate::spectrum::{find_peaks, Spectrum};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_DSP: i32 = 4;
pub const EXIT_IO: i32 = 5;

const SUMMARY_VERSION: u32 = 1;

const USAGE: &str = "\
usage: atomrx <command> <scenario-file> [--out-dir DIR]

commands:
  eit-spectrum   sweep the coupling detuning and write the EIT spectrum
  at-infer       extract the Autler-Townes splitting and invert to field
  calibrate      fit E = k*sqrt(P) on synthesized points, report sensitivity
  heterodyne     synthesize a beat trace and its power spectrum
  link-budget    compose the satellite-to-receiver power ledger
  beacon-sim     end-to-end beacon reception: budget, trace, measured SNR
  modulated-sim  end-to-end square-modulated reception with sidebands
";

#[derive(Debug)]
enum CliError {
    Usage(String),
    Scenario(ScenarioError),
    Solver(SolverError),
    Dsp(DspError),
    Inference(InferenceError),
    Link(LinkError),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Scenario(_) => EXIT_USAGE,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Dsp(DspError::Solver(_)) => EXIT_SOLVER,
            CliError::Dsp(_) | CliError::Inference(_) => EXIT_DSP,
            CliError::Link(_) => EXIT_DSP,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Scenario(e) => e.to_string(),
            CliError::Solver(e) => e.to_string(),
            CliError::Dsp(e) => e.to_string(),
            CliError::Inference(e) => e.to_string(),
            CliError::Link(e) => e.to_string(),
            CliError::Io(m) => m.clone(),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Scenario(e)
    }
}
impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::Solver(e)
    }
}
impl From<DspError> for CliError {
    fn from(e: DspError) -> Self {
        CliError::Dsp(e)
    }
}
impl From<InferenceError> for CliError {
    fn from(e: InferenceError) -> Self {
        CliError::Inference(e)
    }
}
impl From<LinkError> for CliError {
    fn from(e: LinkError) -> Self {
        CliError::Link(e)
    }
}

/// Run the CLI on already-split arguments (without the program name).
/// Returns the process exit code; artifacts are written to the scenario's
/// output paths under `--out-dir` (default: current directory).
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        println!("{USAGE}");
        return EXIT_SUCCESS;
    }
    match run_inner(&args) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            EXIT_SUCCESS
        }
        Err(err) => {
            eprintln!("atomrx: {}", err.message());
            if matches!(err, CliError::Usage(_)) {
                eprintln!("{USAGE}");
            }
            err.exit_code()
        }
    }
}

fn run_inner(args: &[String]) -> Result<Vec<String>, CliError> {
    let mut positional = Vec::new();
    let mut out_dir = PathBuf::from(".");
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        if arg == "--out-dir" {
            let dir = iter
                .next()
                .ok_or_else(|| CliError::Usage("--out-dir needs a value".to_string()))?;
            out_dir = PathBuf::from(dir);
        } else if arg.starts_with('-') {
            return Err(CliError::Usage(format!("unknown option `{arg}`")));
        } else {
            positional.push(arg.clone());
        }
    }
    let [command, scenario_path] = positional.as_slice() else {
        return Err(CliError::Usage(
            "expected a command and a scenario file".to_string(),
        ));
    };

    let text = std::fs::read_to_string(scenario_path)
        .map_err(|e| CliError::Io(format!("cannot read {scenario_path}: {e}")))?;
    let scenario = parse_scenario(&text)?;

    let outcome = match command.as_str() {
        "eit-spectrum" => run_eit(&scenario, false)?,
        "at-infer" => run_eit(&scenario, true)?,
        "calibrate" => run_calibrate(&scenario)?,
        "heterodyne" => run_heterodyne(&scenario, "heterodyne")?,
        "link-budget" => run_link_budget(&scenario)?,
        "beacon-sim" => run_heterodyne(&scenario, "beacon-sim")?,
        "modulated-sim" => run_heterodyne(&scenario, "modulated-sim")?,
        other => return Err(CliError::Usage(format!("unknown command `{other}`"))),
    };

    let csv_path = out_dir.join(&scenario.output.csv);
    let summary_path = out_dir.join(&scenario.output.summary);
    write_file(&csv_path, &outcome.csv)?;
    let summary_json = serde_json::to_string_pretty(&outcome.summary)
        .map_err(|e| CliError::Io(format!("summary serialization failed: {e}")))?;
    write_file(&summary_path, &summary_json)?;

    let mut lines = outcome.stdout;
    lines.push(format!(
        "wrote {} and {}",
        csv_path.display(),
        summary_path.display()
    ));
    Ok(lines)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

struct Outcome {
    csv: String,
    summary: RunSummary,
    stdout: Vec<String>,
}

#[derive(Serialize)]
struct RunSummary {
    version: u32,
    command: String,
    scenario: Scenario,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum: Option<SpectrumSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inference: Option<InferenceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibration: Option<CalibrationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<BudgetSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    heterodyne: Option<HeterodyneSummary>,
}

impl RunSummary {
    fn new(command: &str, scenario: &Scenario) -> Self {
        RunSummary {
            version: SUMMARY_VERSION,
            command: command.to_string(),
            scenario: scenario.clone(),
            spectrum: None,
            inference: None,
            calibration: None,
            budget: None,
            heterodyne: None,
        }
    }
}

#[derive(Serialize)]
struct PeakSummary {
    position_hz: f64,
    height: f64,
    prominence: f64,
}

#[derive(Serialize)]
struct SpectrumSummary {
    axis: String,
    n_points: usize,
    x_min_hz: f64,
    x_max_hz: f64,
    doppler_averaged: bool,
    peaks: Vec<PeakSummary>,
}

#[derive(Serialize)]
struct InferenceSummary {
    splitting_hz: f64,
    e_field_v_per_m: f64,
    omega_mw_equivalent_hz: f64,
    configured_omega_mw_hz: f64,
}

#[derive(Serialize)]
struct CalibrationSummary {
    k_fit_v_per_m_sqrt_w: f64,
    k_true_v_per_m_sqrt_w: f64,
    fit_r2: f64,
    n_points: usize,
    residual_rms_v_per_m: f64,
    e_min_v_per_m: f64,
    sensitivity_v_per_m_sqrt_hz: f64,
    min_detectable_power_dbm: f64,
    dynamic_range_db: f64,
}

#[derive(Serialize)]
struct BudgetSummary {
    tx_power_dbm: f64,
    tx_power_assumed: bool,
    terms_db: Vec<(String, f64)>,
    checkpoints_dbm: Vec<(String, f64)>,
    rx_power_dbm: f64,
    noise_floor_dbm: f64,
    floor_rbw_hz: f64,
    predicted_snr_db: f64,
}

#[derive(Serialize)]
struct SidebandSummary {
    offset_hz: f64,
    predicted_rel_db: f64,
    measured_db: f64,
}

#[derive(Serialize)]
struct HeterodyneSummary {
    e_loc_v_per_m: f64,
    e_sig_v_per_m: f64,
    noise_rms_v_per_m: f64,
    response_slope_per_v_per_m: f64,
    rbw_hz: f64,
    signal_band_hz: (f64, f64),
    signal_power_db: f64,
    noise_floor_db: f64,
    measured_snr_db: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    predicted_snr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reported_snr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sidebands: Option<Vec<SidebandSummary>>,
}

/// CSV with the self-describing header: `# axis=<kind> unit=<u> rbw=<Hz>`.
fn spectrum_csv(spec: &Spectrum) -> String {
    let mut out = String::with_capacity(spec.len() * 24 + 64);
    let _ = writeln!(
        out,
        "# axis={} unit={} rbw={}",
        spec.axis_kind.label(),
        spec.axis_kind.y_unit(),
        spec.rbw.unwrap_or(0.0)
    );
    for (x, y) in spec.x().iter().zip(spec.y().iter()) {
        let _ = writeln!(out, "{x},{y}");
    }
    out
}

fn ledger_csv(budget: &LinkBudget) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# axis=budget-term unit=dBm rbw=0");
    let _ = writeln!(out, "0,{}", budget.tx_power);
    for (i, (_, power)) in budget.checkpoints().iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, power);
    }
    out
}

fn budget_summary(scenario: &Scenario, budget: &LinkBudget) -> BudgetSummary {
    BudgetSummary {
        tx_power_dbm: budget.tx_power,
        tx_power_assumed: scenario.budget.tx_power_assumed,
        terms_db: budget.terms.clone(),
        checkpoints_dbm: budget.checkpoints(),
        rx_power_dbm: budget.rx_power,
        noise_floor_dbm: budget.noise_floor,
        floor_rbw_hz: scenario.budget.floor_rbw_hz,
        predicted_snr_db: budget.predicted_snr,
    }
}

fn run_eit(scenario: &Scenario, infer: bool) -> Result<Outcome, CliError> {
    let sys = scenario.ladder_system();
    let range = (scenario.sweep.delta_c_min_hz, scenario.sweep.delta_c_max_hz);
    let n = scenario.sweep.n_points;
    let spec = match scenario.doppler_averaging() {
        Some(avg) => avg.eit_spectrum(&sys, range, n)?,
        None => eit_spectrum(&sys, range, n)?,
    };

    let peaks = find_peaks(&spec, scenario.sweep.prominence);
    let command = if infer { "at-infer" } else { "eit-spectrum" };
    let mut summary = RunSummary::new(command, scenario);
    summary.spectrum = Some(SpectrumSummary {
        axis: spec.axis_kind.label().to_string(),
        n_points: spec.len(),
        x_min_hz: spec.x()[0],
        x_max_hz: spec.x()[spec.len() - 1],
        doppler_averaged: scenario.doppler.enabled,
        peaks: peaks
            .iter()
            .take(4)
            .map(|p| PeakSummary {
                position_hz: p.x,
                height: p.height,
                prominence: p.prominence,
            })
            .collect(),
    });

    let mut stdout = vec![format!(
        "{}: {} points, {} peak(s)",
        command,
        spec.len(),
        peaks.len()
    )];

    if infer {
        let splitting = splitting_from_spectrum(&spec, scenario.sweep.prominence)?;
        let e_field = field_from_splitting(splitting, scenario.dipole_moment())?;
        let omega_equiv = scenario.dipole_moment() * e_field / crate::inference::HBAR;
        summary.inference = Some(InferenceSummary {
            splitting_hz: splitting,
            e_field_v_per_m: e_field,
            omega_mw_equivalent_hz: omega_equiv / std::f64::consts::TAU,
            configured_omega_mw_hz: scenario.atomic.omega_mw_hz,
        });
        stdout.push(format!(
            "splitting {:.4} MHz -> E = {:.6} V/m",
            splitting / 1e6,
            e_field
        ));
    }

    Ok(Outcome {
        csv: spectrum_csv(&spec),
        summary,
        stdout,
    })
}

fn run_calibrate(scenario: &Scenario) -> Result<Outcome, CliError> {
    let c = &scenario.calibration;
    let k_true = c.k_v_per_m_sqrt_w;
    let noise = gaussian_noise(c.noise_pct / 100.0, c.n_points, c.seed);
    let points: Vec<(f64, f64)> = (0..c.n_points)
        .map(|i| {
            let dbm = c.power_min_dbm
                + (c.power_max_dbm - c.power_min_dbm) * i as f64 / (c.n_points - 1) as f64;
            let p = dbm_to_watts(dbm);
            (p, k_true * p.sqrt() * (1.0 + noise[i]))
        })
        .collect();
    let cal = fit_calibration(&points)?;

    let e_min = cal.k * dbm_to_watts(scenario.budget.noise_floor_dbm).sqrt();
    let report = sensitivity_report(
        e_min,
        scenario.budget.floor_rbw_hz,
        scenario.budget.noise_floor_dbm,
        c.max_linear_power_dbm,
    )?;

    let residual_rms =
        (cal.residuals.iter().map(|r| r * r).sum::<f64>() / cal.residuals.len() as f64).sqrt();
    let mut summary = RunSummary::new("calibrate", scenario);
    summary.calibration = Some(CalibrationSummary {
        k_fit_v_per_m_sqrt_w: cal.k,
        k_true_v_per_m_sqrt_w: k_true,
        fit_r2: cal.fit_r2,
        n_points: cal.n_points,
        residual_rms_v_per_m: residual_rms,
        e_min_v_per_m: report.e_min,
        sensitivity_v_per_m_sqrt_hz: report.sensitivity,
        min_detectable_power_dbm: report.min_detectable_power,
        dynamic_range_db: report.dynamic_range,
    });

    // CSV: sqrt(P) against E, the straight line of the fit.
    let mut csv = String::new();
    let _ = writeln!(csv, "# axis=sqrt-power unit=V/m rbw=0");
    for (p, e) in &points {
        let _ = writeln!(csv, "{},{}", p.sqrt(), e);
    }

    Ok(Outcome {
        csv,
        summary,
        stdout: vec![format!(
            "calibrate: k = {:.4} V/m/sqrt(W) (R^2 = {:.6}), sensitivity {:.3e} V/m/sqrt(Hz)",
            cal.k, cal.fit_r2, report.sensitivity
        )],
    })
}

fn run_link_budget(scenario: &Scenario) -> Result<Outcome, CliError> {
    let budget = scenario.link_budget()?;
    let mut summary = RunSummary::new("link-budget", scenario);
    summary.budget = Some(budget_summary(scenario, &budget));
    let stdout = vec![format!(
        "link-budget: rx {:.2} dBm vs floor {:.2} dBm -> predicted SNR {:.2} dB",
        budget.rx_power, budget.noise_floor, budget.predicted_snr
    )];
    Ok(Outcome {
        csv: ledger_csv(&budget),
        summary,
        stdout,
    })
}

fn run_heterodyne(scenario: &Scenario, command: &str) -> Result<Outcome, CliError> {
    let h = &scenario.heterodyne;
    let budget = scenario.link_budget()?;

    let e_sig = if h.e_sig_v_per_m > 0.0 {
        h.e_sig_v_per_m
    } else {
        scenario.e_sig_for_rx_power(budget.rx_power)
    };
    let noise_rms = if h.noise_from_floor {
        scenario.noise_rms_from_floor()
    } else {
        h.noise_rms_v_per_m
    };

    let tone = scenario.tone_spec(e_sig);
    let receiver = HeterodyneReceiver::new(scenario.ladder_system(), scenario.dipole_moment())?;
    let slope = receiver.response_slope(h.e_loc_v_per_m)?;
    let trace = receiver.synthesize_trace(
        h.e_loc_v_per_m,
        &tone,
        h.sample_rate_hz,
        h.duration_s,
        noise_rms,
        h.seed,
    )?;
    let spec = power_spectrum(&trace, h.rbw_hz)?;
    let band = scenario.signal_band();
    let snr = measure_snr(&spec, band)?;

    let sidebands = if scenario.is_square() {
        Some(sideband_table(&tone, &spec)?)
    } else {
        None
    };

    let mut summary = RunSummary::new(command, scenario);
    summary.budget = Some(budget_summary(scenario, &budget));
    summary.heterodyne = Some(HeterodyneSummary {
        e_loc_v_per_m: h.e_loc_v_per_m,
        e_sig_v_per_m: e_sig,
        noise_rms_v_per_m: noise_rms,
        response_slope_per_v_per_m: slope,
        rbw_hz: h.rbw_hz,
        signal_band_hz: band,
        signal_power_db: snr.signal_power,
        noise_floor_db: snr.noise_floor,
        measured_snr_db: snr.snr,
        predicted_snr_db: Some(budget.predicted_snr),
        reported_snr_db: scenario.budget.reported_snr_db,
        sidebands,
    });

    let stdout = vec![format!(
        "{}: measured SNR {:.2} dB at {:.0} Hz RBW (ledger predicts {:.2} dB)",
        command, snr.snr, h.rbw_hz, budget.predicted_snr
    )];

    Ok(Outcome {
        csv: spectrum_csv(&spec),
        summary,
        stdout,
    })
}

fn sideband_table(tone: &ToneSpec, spec: &Spectrum) -> Result<Vec<SidebandSummary>, CliError> {
    let predicted = square_mod_sidebands(tone, crate::heterodyne::DEFAULT_HARMONIC_CAP)?;
    let mut rows = Vec::with_capacity(predicted.len());
    for (offset, rel_db) in predicted {
        let measured = nearest_bin_power(spec, offset);
        rows.push(SidebandSummary {
            offset_hz: offset,
            predicted_rel_db: rel_db,
            measured_db: measured,
        });
    }
    Ok(rows)
}

fn nearest_bin_power(spec: &Spectrum, freq: f64) -> f64 {
    let x = spec.x();
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, xi) in x.iter().enumerate() {
        let dist = (xi - freq).abs();
        if dist < best_dist {
            best_dist = dist;
            best = i;
        }
    }
    spec.y()[best]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_arguments_is_usage_error() {
        assert_eq!(run(Vec::<String>::new()), EXIT_USAGE);
        assert_eq!(run(vec!["link-budget".to_string()]), EXIT_USAGE);
    }

    #[test]
    fn unknown_command_is_usage_error() {
        let dir = std::env::temp_dir().join("atomrx-cli-unit");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("min.scenario");
        std::fs::write(
            &path,
            "name = t\n[atomic]\nomega_p_hz = 1e6\nomega_c_hz = 5e6\ndipole_moment_ea0 = 2000\n",
        )
        .unwrap();
        assert_eq!(
            run(vec!["frobnicate".to_string(), path.display().to_string()]),
            EXIT_USAGE
        );
    }

    #[test]
    fn missing_file_is_io_error() {
        assert_eq!(
            run(vec![
                "link-budget".to_string(),
                "/nonexistent/path.scenario".to_string()
            ]),
            EXIT_IO
        );
    }
}
