//! Welch power spectra and SNR measurement on baseband traces.
//!
//! The resolution bandwidth is emulated by segment length: `n_seg =
//! round(sample_rate / rbw)` samples per Hann-windowed segment at 50%
//! overlap. Powers are one-sided, spectrum-scaled (a bin-centered tone of
//! amplitude A reads A^2/2) in dB relative to a fixed unit reference, so a
//! tone's reading is independent of RBW while the noise floor scales with it.
//! Each segment has its mean removed before windowing, which emulates the
//! AC-coupled input of a spectrum analyzer.

use crate::heterodyne::BasebandTrace;
use crate::spectrum::{AxisKind, Spectrum};
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// Equivalent noise bandwidth of the periodic Hann window, in bins.
pub const HANN_ENBW_BINS: f64 = 1.5;

#[derive(Debug, Error, PartialEq)]
pub enum DspError {
    #[error("sample rate {sample_rate} Hz cannot represent content up to {required} Hz")]
    AliasingRejected { sample_rate: f64, required: f64 },
    #[error("rbw {rbw} Hz too fine for a {duration} s trace")]
    RbwTooFine { rbw: f64, duration: f64 },
    #[error("signal band contains no spectrum bins")]
    EmptyBand,
    #[error("operation applies only to square-modulated tones")]
    WrongKind,
    #[error(transparent)]
    Solver(#[from] crate::atomic::SolverError),
}

/// Relative signal and noise powers extracted from a spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SnrMeasurement {
    /// Strongest bin inside the signal band, dB re the fixed reference.
    pub signal_power: f64,
    /// Median of the bins outside the band (robust to spurs), same scale.
    pub noise_floor: f64,
    /// signal_power - noise_floor, dB.
    pub snr: f64,
    /// Resolution bandwidth of the underlying spectrum, Hz.
    pub rbw: f64,
}

/// Welch-averaged one-sided power spectrum of a trace at the given RBW.
pub fn power_spectrum(trace: &BasebandTrace, rbw: f64) -> Result<Spectrum, DspError> {
    assert!(rbw > 0.0, "rbw must be > 0");
    let fs = trace.sample_rate;
    let samples = trace.samples.as_slice();
    let n_seg = (fs / rbw).round() as usize;
    assert!(n_seg >= 4, "rbw too coarse for the sample rate");
    if n_seg > samples.len() {
        return Err(DspError::RbwTooFine {
            rbw,
            duration: trace.duration,
        });
    }

    // Periodic Hann window; sums are exact for this variant:
    // S1 = N/2, S2 = 3N/8.
    let window: Vec<f64> = (0..n_seg)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / n_seg as f64).cos()))
        .collect();
    let s1: f64 = window.iter().sum();

    let hop = (n_seg / 2).max(1);
    let n_segments = (samples.len() - n_seg) / hop + 1;
    let n_bins = n_seg / 2 + 1;

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n_seg);
    let mut accum = vec![0.0f64; n_bins];
    let mut buf = vec![C64::new(0.0, 0.0); n_seg];

    for seg in 0..n_segments {
        let chunk = &samples[seg * hop..seg * hop + n_seg];
        let mean: f64 = chunk.iter().sum::<f64>() / n_seg as f64;
        for (i, (c, w)) in chunk.iter().zip(window.iter()).enumerate() {
            buf[i] = C64::new((c - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (k, a) in accum.iter_mut().enumerate() {
            *a += buf[k].norm_sqr();
        }
    }

    let coherent = s1 * s1;
    let k_avg = n_segments as f64;
    let x: Vec<f64> = (0..n_bins).map(|k| k as f64 * fs / n_seg as f64).collect();
    let y: Vec<f64> = accum
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let one_sided = if k == 0 || (n_seg.is_multiple_of(2) && k == n_seg / 2) {
                1.0
            } else {
                2.0
            };
            let power = one_sided * a / (k_avg * coherent);
            10.0 * power.max(1e-300).log10()
        })
        .collect();

    Ok(Spectrum::new(AxisKind::BasebandFrequency, x, y, Some(rbw)))
}

/// Total power recovered from a [`power_spectrum`] output: linear bin powers
/// divided by the Hann equivalent noise bandwidth. Matches the trace variance
/// (Parseval with the Welch window correction).
pub fn integrated_power(spec: &Spectrum) -> f64 {
    spec.y()
        .iter()
        .map(|db| 10.0f64.powf(db / 10.0))
        .sum::<f64>()
        / HANN_ENBW_BINS
}

/// Measure SNR against a signal band `(lo, hi)` in Hz: the strongest bin in
/// band versus the median of all bins outside it.
pub fn measure_snr(spec: &Spectrum, signal_band: (f64, f64)) -> Result<SnrMeasurement, DspError> {
    let (lo, hi) = signal_band;
    let mut in_band = f64::NEG_INFINITY;
    let mut outside = Vec::new();
    for (x, y) in spec.x().iter().zip(spec.y().iter()) {
        if *x >= lo && *x <= hi {
            in_band = in_band.max(*y);
        } else {
            outside.push(*y);
        }
    }
    if !in_band.is_finite() || outside.is_empty() {
        return Err(DspError::EmptyBand);
    }
    outside.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = outside.len() / 2;
    let noise_floor = if outside.len() % 2 == 1 {
        outside[mid]
    } else {
        0.5 * (outside[mid - 1] + outside[mid])
    };
    Ok(SnrMeasurement {
        signal_power: in_band,
        noise_floor,
        snr: in_band - noise_floor,
        rbw: spec.rbw.unwrap_or(0.0),
    })
}
