//! EIT spectra over coupling-laser detuning, with optional Doppler averaging.
//!
//! The probe transmission proxy is defined from the steady-state probe
//! coherence: absorption A = -Im(rho_21), and the reported transmission is
//! `T(delta_c) = (A_bg - A(delta_c)) * scale`, where `A_bg` is the
//! coupling-off background absorption and `scale` normalizes the microwave-free
//! transparency peak to height 1. Spectra with a microwave field applied keep
//! the microwave-free scale so Autler-Townes doublets appear with their true
//! relative height.

use crate::atomic::{steady_state, LadderSystem, SolverError};
use crate::spectrum::{AxisKind, Spectrum};
use std::f64::consts::TAU;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Mass of a cesium-133 atom, kg.
pub const CS_MASS_KG: f64 = 2.2069470e-25;

/// Steady-state probe absorption proxy, `-Im(rho_21)`.
pub fn probe_absorption(sys: &LadderSystem) -> Result<f64, SolverError> {
    let rho = steady_state(sys)?;
    Ok(-rho.element(1, 0).im)
}

/// Normalized EIT transmission spectrum versus coupling detuning.
///
/// `delta_c_range_hz` bounds the sweep (Hz, inclusive); `n_points >= 3`.
/// The microwave-free reference sweep fixes the normalization, so the
/// field-free spectrum peaks at exactly 1 on the grid.
pub fn eit_spectrum(
    sys_template: &LadderSystem,
    delta_c_range_hz: (f64, f64),
    n_points: usize,
) -> Result<Spectrum, SolverError> {
    sweep_spectrum(sys_template, delta_c_range_hz, n_points, |sys, _| {
        probe_absorption(sys)
    })
}

/// Shared sweep/normalization skeleton; `absorb` evaluates the absorption of
/// a fully configured system (second argument is the velocity, unused in the
/// non-averaged case).
fn sweep_spectrum(
    sys_template: &LadderSystem,
    delta_c_range_hz: (f64, f64),
    n_points: usize,
    absorb: impl Fn(&LadderSystem, f64) -> Result<f64, SolverError>,
) -> Result<Spectrum, SolverError> {
    assert!(n_points >= 3, "need at least 3 sweep points");
    let (lo, hi) = delta_c_range_hz;
    assert!(
        lo.is_finite() && hi.is_finite() && lo < hi,
        "bad sweep range"
    );
    sys_template.validate()?;
    if sys_template.omega_p <= 0.0 || sys_template.omega_c <= 0.0 {
        return Err(SolverError::InvalidSystem(
            "EIT sweep requires omega_p > 0 and omega_c > 0".into(),
        ));
    }

    // Coupling-off background: no EIT window, plain probe absorption.
    let background = {
        let mut sys = *sys_template;
        sys.omega_c = 0.0;
        sys.omega_mw = 0.0;
        absorb(&sys, 0.0)?
    };

    let x: Vec<f64> = (0..n_points)
        .map(|i| lo + (hi - lo) * i as f64 / (n_points - 1) as f64)
        .collect();

    let mut transparency = Vec::with_capacity(n_points);
    let mut reference_peak = f64::NEG_INFINITY;
    for &detuning_hz in &x {
        let mut sys = *sys_template;
        sys.delta_c = TAU * detuning_hz;
        let a = absorb(&sys, 0.0)?;
        transparency.push(background - a);

        let mut field_free = sys;
        field_free.omega_mw = 0.0;
        let a_ff = absorb(&field_free, 0.0)?;
        reference_peak = reference_peak.max(background - a_ff);
    }

    if !(reference_peak > 0.0) {
        return Err(SolverError::InvalidSystem(
            "field-free EIT reference peak vanished; cannot normalize".into(),
        ));
    }
    let scale = 1.0 / reference_peak;
    let y: Vec<f64> = transparency.into_iter().map(|t| t * scale).collect();
    Ok(Spectrum::new(AxisKind::CouplingDetuning, x, y, None))
}

/// Relative propagation direction of probe and coupling beams.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BeamGeometry {
    /// Coupling runs against the probe; Doppler shifts partially cancel.
    CounterPropagating,
    /// Both beams along the same axis; shifts add.
    CoPropagating,
}

/// Maxwell-Boltzmann velocity averaging applied to the EIT sweep.
///
/// Atoms moving at velocity `v` see `delta_p - k_p v` and, for the
/// counter-propagating geometry, `delta_c + k_c v` (co-propagating flips the
/// coupling shift sign). Velocities are sampled on a uniform grid over
/// +-4.5 thermal widths with trapezoid weights renormalized to sum to 1.
#[derive(Clone, Copy, Debug)]
pub struct DopplerAveraging {
    pub temperature_k: f64,
    pub lambda_probe_m: f64,
    pub lambda_coupling_m: f64,
    pub n_velocity: usize,
    pub geometry: BeamGeometry,
    pub atom_mass_kg: f64,
}

impl DopplerAveraging {
    pub fn new(
        temperature_k: f64,
        lambda_probe_m: f64,
        lambda_coupling_m: f64,
        n_velocity: usize,
    ) -> Self {
        assert!(temperature_k > 0.0, "temperature must be > 0");
        assert!(
            n_velocity >= 11 && n_velocity % 2 == 1,
            "n_velocity must be odd and >= 11"
        );
        assert!(lambda_probe_m > 0.0 && lambda_coupling_m > 0.0);
        DopplerAveraging {
            temperature_k,
            lambda_probe_m,
            lambda_coupling_m,
            n_velocity,
            geometry: BeamGeometry::CounterPropagating,
            atom_mass_kg: CS_MASS_KG,
        }
    }

    pub fn with_geometry(mut self, geometry: BeamGeometry) -> Self {
        self.geometry = geometry;
        self
    }

    /// 1-D thermal velocity width, sqrt(kB T / m).
    pub fn thermal_velocity(&self) -> f64 {
        (BOLTZMANN * self.temperature_k / self.atom_mass_kg).sqrt()
    }

    /// Velocity samples and weights; weights sum to 1 within 1e-9.
    pub fn velocity_grid(&self) -> (Vec<f64>, Vec<f64>) {
        let sigma = self.thermal_velocity();
        let span = 4.5 * sigma;
        let n = self.n_velocity;
        let v: Vec<f64> = (0..n)
            .map(|i| -span + 2.0 * span * i as f64 / (n - 1) as f64)
            .collect();
        // Trapezoid rule against the Gaussian density, renormalized so the
        // discrete weights are an exact probability distribution.
        let mut w: Vec<f64> = v
            .iter()
            .map(|&vi| (-vi * vi / (2.0 * sigma * sigma)).exp())
            .collect();
        w[0] *= 0.5;
        w[n - 1] *= 0.5;
        let total: f64 = w.iter().sum();
        for wi in w.iter_mut() {
            *wi /= total;
        }
        (v, w)
    }

    /// Detuning shifts seen by an atom at velocity `v`.
    fn shifted(&self, sys: &LadderSystem, v: f64) -> LadderSystem {
        let k_p = TAU / self.lambda_probe_m;
        let k_c = TAU / self.lambda_coupling_m;
        let mut out = *sys;
        out.delta_p -= k_p * v;
        match self.geometry {
            BeamGeometry::CounterPropagating => out.delta_c += k_c * v,
            BeamGeometry::CoPropagating => out.delta_c -= k_c * v,
        }
        out
    }

    /// Doppler-averaged EIT spectrum with the same normalization convention
    /// as [`eit_spectrum`].
    pub fn eit_spectrum(
        &self,
        sys_template: &LadderSystem,
        delta_c_range_hz: (f64, f64),
        n_points: usize,
    ) -> Result<Spectrum, SolverError> {
        let (velocities, weights) = self.velocity_grid();
        sweep_spectrum(sys_template, delta_c_range_hz, n_points, |sys, _| {
            let mut acc = 0.0;
            for (&v, &w) in velocities.iter().zip(weights.iter()) {
                acc += w * probe_absorption(&self.shifted(sys, v))?;
            }
            Ok(acc)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::find_peaks;

    fn test_system() -> LadderSystem {
        LadderSystem {
            omega_p: TAU * 0.4e6,
            omega_c: TAU * 2.0e6,
            gamma: [TAU * 2.0e6, TAU * 10.0e3, TAU * 10.0e3],
            ..LadderSystem::default()
        }
    }

    #[test]
    fn field_free_single_peak_at_zero() {
        let spec = eit_spectrum(&test_system(), (-15.0e6, 15.0e6), 301).unwrap();
        let peaks = find_peaks(&spec, 0.2);
        assert_eq!(peaks.len(), 1, "expected a single transparency peak");
        let grid = 30.0e6 / 300.0;
        assert!(peaks[0].x.abs() <= grid, "peak at {} Hz", peaks[0].x);
        let max_y = spec.y().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((max_y - 1.0).abs() < 1e-9, "normalization peak {max_y}");
    }

    #[test]
    fn resonant_microwave_splits_by_rabi_frequency() {
        let mut sys = test_system();
        sys.omega_mw = TAU * 10.0e6;
        let spec = eit_spectrum(&sys, (-15.0e6, 15.0e6), 601).unwrap();
        let peaks = find_peaks(&spec, 0.05);
        assert!(peaks.len() >= 2, "expected an Autler-Townes doublet");
        let separation = (peaks[0].x - peaks[1].x).abs();
        let expect = 10.0e6;
        assert!(
            (separation - expect).abs() < 0.05 * expect,
            "splitting {separation} vs {expect}"
        );
    }

    #[test]
    fn detuned_microwave_asymmetric_doublet_at_dressed_positions() {
        // Finite Rydberg decay and dephasing suppress the weakly admixed
        // dressed state, which is what makes the doublet visibly asymmetric.
        let deph = TAU * 50.0e3;
        let mut sys = test_system();
        sys.gamma = [TAU * 2.0e6, TAU * 100.0e3, TAU * 100.0e3];
        sys.gamma_deph = [0.0, deph, deph, deph, deph, deph];
        sys.delta_mw = TAU * 22.0e6;
        sys.omega_mw = TAU * 10.0e6;
        let spec = eit_spectrum(&sys, (-32.0e6, 10.0e6), 841).unwrap();
        let peaks = find_peaks(&spec, 0.01);
        assert!(peaks.len() >= 2);
        let root = (22.0f64.powi(2) + 10.0f64.powi(2)).sqrt() * 1.0e6;
        let expect_hi = (-22.0e6 + root) / 2.0;
        let expect_lo = (-22.0e6 - root) / 2.0;
        let mut xs = [peaks[0].x, peaks[1].x];
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(
            (xs[0] - expect_lo).abs() < 0.05 * root,
            "low dressed peak {} vs {expect_lo}",
            xs[0]
        );
        assert!(
            (xs[1] - expect_hi).abs() < 0.05 * root,
            "high dressed peak {} vs {expect_hi}",
            xs[1]
        );
        // Far detuned dressed state carries little probe weight.
        let ratio = peaks[1].height / peaks[0].height;
        assert!(
            ratio < 0.55,
            "doublet should be visibly asymmetric, ratio {ratio}"
        );
    }

    #[test]
    fn mirror_symmetry_under_sign_flips() {
        let mut sys = test_system();
        sys.delta_mw = TAU * 8.0e6;
        sys.omega_mw = TAU * 6.0e6;
        let spec = eit_spectrum(&sys, (-20.0e6, 20.0e6), 201).unwrap();

        let mut mirrored = sys;
        mirrored.delta_mw = -sys.delta_mw;
        let spec_m = eit_spectrum(&mirrored, (-20.0e6, 20.0e6), 201).unwrap();

        let n = spec.len();
        for i in 0..n {
            let a = spec.y()[i];
            let b = spec_m.y()[n - 1 - i];
            assert!(
                (a - b).abs() < 1e-8,
                "mirror symmetry violated at index {i}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn doppler_weights_sum_to_one() {
        let avg = DopplerAveraging::new(300.0, 852.357e-9, 509.236e-9, 21);
        let (_, w) = avg.velocity_grid();
        let sum: f64 = w.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9, "weight sum {sum}");
    }

    #[test]
    fn doppler_cold_limit_matches_unaveraged() {
        let sys = test_system();
        let range = (-10.0e6, 10.0e6);
        let plain = eit_spectrum(&sys, range, 61).unwrap();
        let avg = DopplerAveraging::new(1.0e-9, 852.357e-9, 509.236e-9, 11);
        let cold = avg.eit_spectrum(&sys, range, 61).unwrap();
        for (a, b) in plain.y().iter().zip(cold.y().iter()) {
            assert!((a - b).abs() < 1e-6, "cold limit deviates: {a} vs {b}");
        }
    }

    #[test]
    fn room_temperature_counterpropagating_keeps_transparency_peak() {
        // 300 K cesium, counter-propagating. The residual width is set by
        // the velocity class the probe filters out of the full thermal
        // distribution; the transparency window survives, centered at zero.
        let sys = LadderSystem {
            omega_p: TAU * 1.0e6,
            omega_c: TAU * 8.0e6,
            gamma: [TAU * 6.0e6, TAU * 50.0e3, TAU * 50.0e3],
            ..LadderSystem::default()
        };
        let range = (-25.0e6, 25.0e6);
        let warm = DopplerAveraging::new(300.0, 852.357e-9, 509.236e-9, 3001)
            .eit_spectrum(&sys, range, 51)
            .unwrap();
        let peaks = find_peaks(&warm, 0.3);
        assert_eq!(peaks.len(), 1, "one transparency window expected");
        assert!(peaks[0].x.abs() < 1.0e6, "peak at {} Hz", peaks[0].x);
        let max_y = warm.y().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((max_y - 1.0).abs() < 1e-9);
    }

    #[test]
    fn counter_residual_width_grows_with_temperature() {
        // Residual broadening scales with (k_c - k_p) * v_thermal, so the
        // width must grow monotonically with temperature.
        let sys = test_system();
        let range = (-10.0e6, 10.0e6);
        let n_points = 101;
        let mut widths = vec![fwhm(&eit_spectrum(&sys, range, n_points).unwrap())];
        for t in [0.002, 0.02, 0.2] {
            let avg = DopplerAveraging::new(t, 852.357e-9, 509.236e-9, 1501);
            widths.push(fwhm(&avg.eit_spectrum(&sys, range, n_points).unwrap()));
        }
        for pair in widths.windows(2) {
            assert!(
                pair[1] > pair[0],
                "width should grow with temperature: {widths:?}"
            );
        }
    }

    #[test]
    fn counterpropagating_narrower_than_copropagating() {
        // Geometry comparison at 0.1 K, where both residual widths fit the
        // sweep window and the velocity grid resolves the co-propagating
        // two-photon structure. The ordering is temperature-independent:
        // |k_c - k_p| versus k_c + k_p.
        let sys = test_system();
        let range = (-25.0e6, 25.0e6);
        let n_points = 61;
        let base = DopplerAveraging::new(0.1, 852.357e-9, 509.236e-9, 1501);
        let counter = base
            .with_geometry(BeamGeometry::CounterPropagating)
            .eit_spectrum(&sys, range, n_points)
            .unwrap();
        let co = base
            .with_geometry(BeamGeometry::CoPropagating)
            .eit_spectrum(&sys, range, n_points)
            .unwrap();
        let w_counter = fwhm(&counter);
        let w_co = fwhm(&co);
        assert!(
            w_co > 2.0 * w_counter,
            "co-propagating width {w_co} should far exceed counter-propagating {w_counter}"
        );
    }

    /// Full width at half maximum by linear interpolation of the crossings.
    fn fwhm(spec: &Spectrum) -> f64 {
        let y = spec.y();
        let x = spec.x();
        let peak = spec.argmax();
        let half = y[peak] / 2.0;
        let mut left = x[0];
        for i in (1..=peak).rev() {
            if y[i - 1] <= half && y[i] > half {
                let t = (half - y[i - 1]) / (y[i] - y[i - 1]);
                left = x[i - 1] + t * (x[i] - x[i - 1]);
                break;
            }
        }
        let mut right = x[x.len() - 1];
        for i in peak..y.len() - 1 {
            if y[i] > half && y[i + 1] <= half {
                let t = (y[i] - half) / (y[i] - y[i + 1]);
                right = x[i] + t * (x[i + 1] - x[i]);
                break;
            }
        }
        right - left
    }
}
