//! Field inference: Autler-Townes splitting inversion, `E = k*sqrt(P)`
//! calibration fits, and sensitivity reporting.

use crate::spectrum::{find_peaks, Spectrum};
use serde::Serialize;
use thiserror::Error;

/// Reduced Planck constant, J*s (CODATA 2018).
pub const HBAR: f64 = 1.054571817e-34;
/// Planck constant, J*s.
pub const PLANCK: f64 = 6.62607015e-34;
/// One atomic unit of electric dipole moment (e * a0), C*m.
pub const EA0: f64 = 8.4783536255e-30;

/// Default peak prominence threshold (fraction of the y range) used when
/// extracting Autler-Townes doublets.
pub const DEFAULT_PROMINENCE_FRAC: f64 = 0.02;

#[derive(Debug, Error, PartialEq)]
pub enum InferenceError {
    #[error("{0} must be > 0")]
    NonpositiveInput(&'static str),
    #[error("fewer than two qualifying peaks; weak-field regime, use the heterodyne path")]
    NoSplitting,
    #[error("need at least {needed} calibration points, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

/// Through-origin calibration `E = k * sqrt(P)` with fit diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct FieldCalibration {
    /// Slope in V/m per sqrt(W).
    pub k: f64,
    /// Uncentered coefficient of determination, in [0, 1].
    pub fit_r2: f64,
    pub n_points: usize,
    /// Fit residuals E_i - k*sqrt(P_i), V/m.
    pub residuals: Vec<f64>,
}

/// Sensitivity and dynamic-range summary of a receiver operating point.
#[derive(Clone, Debug, Serialize)]
pub struct SensitivityReport {
    /// Minimum detectable field, V/m.
    pub e_min: f64,
    /// Resolution bandwidth the floor was measured at, Hz.
    pub rbw: f64,
    /// e_min / sqrt(rbw), V/m/sqrt(Hz).
    pub sensitivity: f64,
    /// Minimum detectable incident power, dBm.
    pub min_detectable_power: f64,
    /// Span from the noise floor to the top of the linear window, dB.
    pub dynamic_range: f64,
}

/// Microwave field strength from an Autler-Townes splitting:
/// `E = 2*pi*hbar*delta_f / mu` (magnitude; the conventional sign is dropped).
///
/// `delta_f` in Hz, `dipole_moment` in C*m, result in V/m.
pub fn field_from_splitting(delta_f: f64, dipole_moment: f64) -> Result<f64, InferenceError> {
    if !(delta_f > 0.0) {
        return Err(InferenceError::NonpositiveInput("delta_f"));
    }
    if !(dipole_moment > 0.0) {
        return Err(InferenceError::NonpositiveInput("dipole_moment"));
    }
    Ok(PLANCK * delta_f / dipole_moment)
}

/// Frequency distance between the two most prominent transparency peaks.
///
/// Peaks below `prominence_frac` of the y range are ignored; positions are
/// quadratic-refined, so the result beats the sweep grid resolution.
pub fn splitting_from_spectrum(
    spec: &Spectrum,
    prominence_frac: f64,
) -> Result<f64, InferenceError> {
    let peaks = find_peaks(spec, prominence_frac);
    if peaks.len() < 2 {
        return Err(InferenceError::NoSplitting);
    }
    Ok((peaks[0].x - peaks[1].x).abs())
}

/// Least-squares fit of `E = k * sqrt(P)` through the origin.
///
/// Points are `(incident power W, field V/m)`, all positive. The reported
/// R-squared is the uncentered variant, which is guaranteed to land in
/// [0, 1] for a through-origin fit.
pub fn fit_calibration(points: &[(f64, f64)]) -> Result<FieldCalibration, InferenceError> {
    if points.len() < 2 {
        return Err(InferenceError::InsufficientData {
            needed: 2,
            got: points.len(),
        });
    }
    for (p, e) in points {
        if !(*p > 0.0) {
            return Err(InferenceError::NonpositiveInput("power"));
        }
        if !(*e > 0.0) {
            return Err(InferenceError::NonpositiveInput("field"));
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (p, e) in points {
        let s = p.sqrt();
        num += s * e;
        den += p;
    }
    let k = num / den;
    let residuals: Vec<f64> = points.iter().map(|(p, e)| e - k * p.sqrt()).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = points.iter().map(|(_, e)| e * e).sum();
    let fit_r2 = (1.0 - ss_res / ss_tot).clamp(0.0, 1.0);
    Ok(FieldCalibration {
        k,
        fit_r2,
        n_points: points.len(),
        residuals,
    })
}

/// Assemble the sensitivity report: `sensitivity = e_min / sqrt(rbw)` with the
/// noise floor and linear-window top carried through verbatim.
pub fn sensitivity_report(
    e_min: f64,
    rbw: f64,
    noise_floor_dbm: f64,
    max_linear_power_dbm: f64,
) -> Result<SensitivityReport, InferenceError> {
    if !(e_min > 0.0) {
        return Err(InferenceError::NonpositiveInput("e_min"));
    }
    if !(rbw > 0.0) {
        return Err(InferenceError::NonpositiveInput("rbw"));
    }
    if !(max_linear_power_dbm > noise_floor_dbm) {
        return Err(InferenceError::NonpositiveInput("dynamic range"));
    }
    Ok(SensitivityReport {
        e_min,
        rbw,
        sensitivity: e_min / rbw.sqrt(),
        min_detectable_power: noise_floor_dbm,
        dynamic_range: max_linear_power_dbm - noise_floor_dbm,
    })
}
