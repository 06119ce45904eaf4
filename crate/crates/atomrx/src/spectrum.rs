//! Sampled spectra and peak extraction.

use serde::{Deserialize, Serialize};

/// What the x axis of a [`Spectrum`] means.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisKind {
    /// Coupling-laser detuning in Hz; y is normalized transmission.
    CouplingDetuning,
    /// Baseband frequency in Hz; y is power in dB re the fixed reference.
    BasebandFrequency,
}

impl AxisKind {
    pub fn label(&self) -> &'static str {
        match self {
            AxisKind::CouplingDetuning => "coupling-detuning",
            AxisKind::BasebandFrequency => "baseband-frequency",
        }
    }

    pub fn y_unit(&self) -> &'static str {
        match self {
            AxisKind::CouplingDetuning => "transmission",
            AxisKind::BasebandFrequency => "dBm",
        }
    }
}

/// A sampled curve: strictly increasing x (Hz) against transmission or power.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub axis_kind: AxisKind,
    x: Vec<f64>,
    y: Vec<f64>,
    /// Resolution bandwidth in Hz; set for baseband power spectra.
    pub rbw: Option<f64>,
}

impl Spectrum {
    /// Panics if `x` is not strictly increasing or lengths differ.
    pub fn new(axis_kind: AxisKind, x: Vec<f64>, y: Vec<f64>, rbw: Option<f64>) -> Self {
        assert_eq!(x.len(), y.len(), "x and y must have equal length");
        assert!(
            x.windows(2).all(|w| w[0] < w[1]),
            "x must be strictly increasing"
        );
        Spectrum {
            axis_kind,
            x,
            y,
            rbw,
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Index of the greatest y value (first on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for i in 1..self.y.len() {
            if self.y[i] > self.y[best] {
                best = i;
            }
        }
        best
    }
}

/// A local maximum found in a spectrum.
#[derive(Clone, Copy, Debug)]
pub struct Peak {
    /// Quadratic-refined x position.
    pub x: f64,
    /// Quadratic-refined height.
    pub height: f64,
    /// Topographic prominence of the raw sample.
    pub prominence: f64,
    /// Sample index of the raw maximum.
    pub index: usize,
}

/// Find local maxima with prominence at least `min_prominence_frac` of the
/// spectrum's full y range, sorted by descending prominence (ties toward
/// lower x). Peak positions and heights are refined by a three-point
/// parabola through the raw maximum.
pub fn find_peaks(spec: &Spectrum, min_prominence_frac: f64) -> Vec<Peak> {
    let y = spec.y();
    let x = spec.x();
    let n = y.len();
    if n < 3 {
        return Vec::new();
    }
    let y_max = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let y_min = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let range = y_max - y_min;
    if range <= 0.0 {
        return Vec::new();
    }
    let threshold = min_prominence_frac * range;

    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        // Strict rise on the left, non-rise on the right; plateaus resolve
        // toward lower x.
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            continue;
        }
        let prominence = prominence_at(y, i);
        if prominence < threshold {
            continue;
        }
        let (xr, yr) = refine_parabolic(x, y, i);
        peaks.push(Peak {
            x: xr,
            height: yr,
            prominence,
            index: i,
        });
    }
    peaks.sort_by(|a, b| {
        b.prominence
            .partial_cmp(&a.prominence)
            .unwrap()
            .then(a.x.partial_cmp(&b.x).unwrap())
    });
    peaks
}

/// Standard topographic prominence: height above the higher of the two key
/// saddles, where each side's saddle is the minimum between the peak and the
/// nearest strictly higher sample (or the boundary).
fn prominence_at(y: &[f64], peak: usize) -> f64 {
    let h = y[peak];
    let mut left_min = h;
    for j in (0..peak).rev() {
        if y[j] > h {
            break;
        }
        left_min = left_min.min(y[j]);
    }
    let mut right_min = h;
    for value in y.iter().skip(peak + 1) {
        if *value > h {
            break;
        }
        right_min = right_min.min(*value);
    }
    h - left_min.max(right_min)
}

/// Vertex of the parabola through the three samples around `i`.
fn refine_parabolic(x: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    let denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
    if denom >= 0.0 || denom.abs() < 1e-300 {
        return (x[i], y[i]);
    }
    let h = 0.5 * (x[i + 1] - x[i - 1]);
    let shift = 0.5 * (y[i - 1] - y[i + 1]) / denom * h;
    // Keep the vertex inside the neighboring samples.
    let shift = shift.clamp(-h, h);
    let height = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * shift / h;
    (x[i] + shift, height)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_pair(c1: f64, a1: f64, c2: f64, a2: f64, sigma: f64) -> Spectrum {
        let n = 801;
        let x: Vec<f64> = (0..n)
            .map(|i| -20.0e6 + 40.0e6 * i as f64 / (n - 1) as f64)
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&xi| {
                a1 * (-(xi - c1).powi(2) / (2.0 * sigma * sigma)).exp()
                    + a2 * (-(xi - c2).powi(2) / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        Spectrum::new(AxisKind::CouplingDetuning, x, y, None)
    }

    #[test]
    #[should_panic(expected = "strictly increasing")]
    fn rejects_non_monotone_axis() {
        Spectrum::new(
            AxisKind::CouplingDetuning,
            vec![0.0, 1.0, 1.0],
            vec![0.0; 3],
            None,
        );
    }

    #[test]
    fn finds_two_gaussians() {
        let spec = gaussian_pair(-5.0e6, 1.0, 5.0e6, 0.6, 1.0e6);
        let peaks = find_peaks(&spec, 0.05);
        assert_eq!(peaks.len(), 2);
        assert!(
            (peaks[0].x + 5.0e6).abs() < 5.0e4,
            "main peak at {}",
            peaks[0].x
        );
        assert!(
            (peaks[1].x - 5.0e6).abs() < 5.0e4,
            "second peak at {}",
            peaks[1].x
        );
    }

    #[test]
    fn single_peak_yields_one() {
        let spec = gaussian_pair(0.0, 1.0, 0.0, 0.0, 2.0e6);
        let peaks = find_peaks(&spec, 0.05);
        assert_eq!(peaks.len(), 1);
        assert!(peaks[0].x.abs() < 5.0e4);
    }

    #[test]
    fn prominence_threshold_filters_small_bumps() {
        let spec = gaussian_pair(-5.0e6, 1.0, 5.0e6, 0.02, 1.0e6);
        assert_eq!(find_peaks(&spec, 0.05).len(), 1);
        assert_eq!(find_peaks(&spec, 0.01).len(), 2);
    }

    #[test]
    fn refinement_beats_grid_resolution() {
        // Peak center deliberately off-grid.
        let spec = gaussian_pair(-4.9871e6, 1.0, 7.0133e6, 0.8, 1.5e6);
        let peaks = find_peaks(&spec, 0.05);
        let grid = 40.0e6 / 800.0;
        assert!((peaks[0].x + 4.9871e6).abs() < grid / 10.0);
        assert!((peaks[1].x - 7.0133e6).abs() < grid / 10.0);
    }
}
