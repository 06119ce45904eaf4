//! Superheterodyne readout: a strong local microwave plus a weak signal tone
//! beat in the atomic transmission, down-converting the signal to baseband.
//!
//! The default synthesis linearizes the atomic response around the local-field
//! operating point (the receiver is operated inside its linear window); a
//! validation mode integrates the master equation sample by sample for short
//! traces and must agree with the linearized model on beat-tone power.

use crate::atomic::{evolve_driven, steady_state, LadderSystem, SolverError};
use crate::eit::probe_absorption;
use crate::inference::HBAR;
use crate::psd::DspError;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Harmonic cap used by default when predicting square-wave sidebands.
pub const DEFAULT_HARMONIC_CAP: usize = 5;

/// Signal tone riding on the local field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ToneKind {
    /// Unmodulated single-frequency carrier.
    Beacon,
    /// Carrier on/off keyed by a square wave.
    SquareModulated,
}

/// Description of the signal microwave relative to the local oscillator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToneSpec {
    pub kind: ToneKind,
    /// Beat frequency against the local field, Hz.
    pub offset: f64,
    /// Signal field amplitude, V/m.
    pub amplitude: f64,
    /// Phase of the beat at t = 0, rad.
    pub phase: f64,
    /// Square-wave fundamental for the modulated kind, Hz.
    pub mod_rate: f64,
    /// Occupied bandwidth metadata, Hz.
    pub bandwidth: f64,
    /// On fraction of the modulation period.
    pub duty: f64,
    /// False: on/off keying in {0, 1}. True: {-1, +1} keying.
    pub bipolar: bool,
}

impl ToneSpec {
    pub fn beacon(offset: f64, amplitude: f64, phase: f64) -> Self {
        assert!(offset >= 0.0 && amplitude >= 0.0);
        ToneSpec {
            kind: ToneKind::Beacon,
            offset,
            amplitude,
            phase,
            mod_rate: 0.0,
            bandwidth: 0.0,
            duty: 0.5,
            bipolar: false,
        }
    }

    pub fn square_modulated(
        offset: f64,
        amplitude: f64,
        phase: f64,
        mod_rate: f64,
        bandwidth: f64,
    ) -> Self {
        assert!(offset >= 0.0 && amplitude >= 0.0);
        assert!(mod_rate > 0.0, "mod_rate must be > 0 for square modulation");
        ToneSpec {
            kind: ToneKind::SquareModulated,
            offset,
            amplitude,
            phase,
            mod_rate,
            bandwidth,
            duty: 0.5,
            bipolar: false,
        }
    }

    /// Modulation envelope at time `t`.
    fn envelope(&self, t: f64) -> f64 {
        match self.kind {
            ToneKind::Beacon => 1.0,
            ToneKind::SquareModulated => {
                let frac = (t * self.mod_rate).rem_euclid(1.0);
                let on = frac < self.duty;
                match (on, self.bipolar) {
                    (true, _) => 1.0,
                    (false, false) => 0.0,
                    (false, true) => -1.0,
                }
            }
        }
    }

    /// Highest frequency content synthesized for this tone, Hz.
    fn content_bandwidth(&self) -> f64 {
        match self.kind {
            ToneKind::Beacon => self.offset,
            ToneKind::SquareModulated => self.offset + DEFAULT_HARMONIC_CAP as f64 * self.mod_rate,
        }
    }
}

/// Instantaneous total field: `E_loc + E_sig * envelope(t) * cos(dw t + phase)`.
pub fn total_field(e_loc: f64, tone: &ToneSpec, t: f64) -> f64 {
    debug_assert!(e_loc > 0.0);
    e_loc + tone.amplitude * tone.envelope(t) * (TAU * tone.offset * t + tone.phase).cos()
}

/// Predicted square-wave sidebands: offsets `offset +- n * mod_rate` for
/// harmonics with nonvanishing Fourier weight up to `harmonic_cap`, with
/// amplitudes in dB relative to the first harmonic (1/n for 50% duty, i.e.
/// -20 log10(n)).
pub fn square_mod_sidebands(
    tone: &ToneSpec,
    harmonic_cap: usize,
) -> Result<Vec<(f64, f64)>, DspError> {
    if tone.kind != ToneKind::SquareModulated {
        return Err(DspError::WrongKind);
    }
    let duty = tone.duty;
    let first = (PI * duty).sin().abs();
    let mut out = Vec::new();
    for n in 1..=harmonic_cap {
        let weight = (PI * n as f64 * duty).sin().abs() / n as f64;
        if weight < 1e-12 {
            continue;
        }
        let rel_db = 20.0 * (weight / first).log10();
        out.push((tone.offset - n as f64 * tone.mod_rate, rel_db));
        out.push((tone.offset + n as f64 * tone.mod_rate, rel_db));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(out)
}

/// Digitized photodetector output: dimensionless transmission samples.
#[derive(Clone, Debug)]
pub struct BasebandTrace {
    pub sample_rate: f64,
    pub samples: Vec<f64>,
    pub duration: f64,
}

/// Deterministic white Gaussian samples (SplitMix64 + Box-Muller). Kept
/// in-crate so fixed seeds reproduce byte-identical traces regardless of
/// dependency versions.
pub fn gaussian_noise(rms: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed;
    let mut next_u64 = move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    let mut uniform = move || ((next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u1 = uniform();
        let u2 = uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = TAU * u2;
        out.push(rms * radius * angle.cos());
        if out.len() < n {
            out.push(rms * radius * angle.sin());
        }
    }
    out
}

/// The atomic receiver at its heterodyne operating point: ladder parameters
/// (the microwave Rabi frequency is driven by the total field) plus the
/// Rydberg-Rydberg dipole moment converting field to Rabi frequency.
#[derive(Clone, Debug)]
pub struct HeterodyneReceiver {
    sys: LadderSystem,
    /// Transition dipole moment, C*m.
    dipole_moment: f64,
    /// Coupling-off background absorption.
    background: f64,
    /// Background minus the microwave-free absorption; normalizes the
    /// transmission so the field-free operating point reads 1.
    reference_peak: f64,
}

impl HeterodyneReceiver {
    pub fn new(sys: LadderSystem, dipole_moment: f64) -> Result<Self, SolverError> {
        sys.validate()?;
        if !(dipole_moment > 0.0) {
            return Err(SolverError::InvalidSystem(
                "dipole moment must be > 0".into(),
            ));
        }
        if sys.omega_p <= 0.0 || sys.omega_c <= 0.0 {
            return Err(SolverError::InvalidSystem(
                "heterodyne receiver requires omega_p > 0 and omega_c > 0".into(),
            ));
        }
        let background = {
            let mut bare = sys;
            bare.omega_c = 0.0;
            bare.omega_mw = 0.0;
            probe_absorption(&bare)?
        };
        let field_free = {
            let mut ff = sys;
            ff.omega_mw = 0.0;
            probe_absorption(&ff)?
        };
        let reference_peak = background - field_free;
        if !(reference_peak > 0.0) {
            return Err(SolverError::InvalidSystem(
                "no transparency window at the operating point".into(),
            ));
        }
        Ok(HeterodyneReceiver {
            sys,
            dipole_moment,
            background,
            reference_peak,
        })
    }

    /// Microwave Rabi frequency for a field amplitude, rad/s.
    pub fn rabi_from_field(&self, e_field: f64) -> f64 {
        self.dipole_moment * e_field / HBAR
    }

    fn at_field(&self, e_field: f64) -> LadderSystem {
        let mut sys = self.sys;
        sys.omega_mw = self.rabi_from_field(e_field.max(0.0));
        sys
    }

    /// Normalized steady-state transmission at a given total field amplitude.
    pub fn transmission(&self, e_field: f64) -> Result<f64, SolverError> {
        let a = probe_absorption(&self.at_field(e_field))?;
        Ok((self.background - a) / self.reference_peak)
    }

    /// Small-signal slope dT/dE at the operating field, by central finite
    /// difference with relative step `rel_step`.
    pub fn response_slope_with_step(&self, e_loc: f64, rel_step: f64) -> Result<f64, SolverError> {
        assert!(e_loc > 0.0 && rel_step > 0.0);
        let h = rel_step * e_loc;
        let hi = self.transmission(e_loc + h)?;
        let lo = self.transmission(e_loc - h)?;
        Ok((hi - lo) / (2.0 * h))
    }

    /// Small-signal slope with the default 1e-3 relative step.
    pub fn response_slope(&self, e_loc: f64) -> Result<f64, SolverError> {
        self.response_slope_with_step(e_loc, 1e-3)
    }

    /// Synthesize a baseband trace through the linearized atomic response:
    /// `T(t) = g * E_tot(t) + noise`, Gaussian noise rms `noise_rms * |g|`.
    /// Deterministic for a fixed seed.
    pub fn synthesize_trace(
        &self,
        e_loc: f64,
        tone: &ToneSpec,
        sample_rate: f64,
        duration: f64,
        noise_rms: f64,
        seed: u64,
    ) -> Result<BasebandTrace, DspError> {
        let n = check_sampling(tone, sample_rate, duration)?;
        let slope = self.response_slope(e_loc)?;
        let offset = self.transmission(e_loc)? - slope * e_loc;
        let mut samples = Vec::with_capacity(n);
        for i in 0..n {
            let t = i as f64 / sample_rate;
            samples.push(offset + slope * total_field(e_loc, tone, t));
        }
        add_noise(&mut samples, noise_rms * slope.abs(), seed);
        Ok(BasebandTrace {
            sample_rate,
            samples,
            duration,
        })
    }

    /// Validation mode: integrate the master equation with the instantaneous
    /// drive `omega_mw(t) = mu E_tot(t) / hbar` and record the normalized
    /// transmission at each sample instant. Starts from the steady state of
    /// the t = 0 field so no artificial turn-on transient pollutes the trace.
    /// Orders of magnitude slower than the linearized path; intended for
    /// traces up to about a millisecond.
    #[allow(clippy::too_many_arguments)]
    pub fn synthesize_trace_exact(
        &self,
        e_loc: f64,
        tone: &ToneSpec,
        sample_rate: f64,
        duration: f64,
        noise_rms: f64,
        seed: u64,
        dt_max: f64,
    ) -> Result<BasebandTrace, DspError> {
        let n = check_sampling(tone, sample_rate, duration)?;
        let sys_at = |t: f64| self.at_field(total_field(e_loc, tone, t));
        let mut rho = steady_state(&sys_at(0.0))?;
        let slope = self.response_slope(e_loc)?;
        let mut samples = Vec::with_capacity(n);
        let dt_sample = 1.0 / sample_rate;
        for i in 0..n {
            if i > 0 {
                let t0 = (i - 1) as f64 * dt_sample;
                rho = evolve_driven(&sys_at, &rho, t0, t0 + dt_sample, dt_max)?;
            }
            let absorption = -rho.element(1, 0).im;
            samples.push((self.background - absorption) / self.reference_peak);
        }
        add_noise(&mut samples, noise_rms * slope.abs(), seed);
        Ok(BasebandTrace {
            sample_rate,
            samples,
            duration,
        })
    }
}

fn check_sampling(tone: &ToneSpec, sample_rate: f64, duration: f64) -> Result<usize, DspError> {
    assert!(duration > 0.0, "duration must be > 0");
    let required = tone.content_bandwidth();
    if sample_rate <= 2.0 * required {
        return Err(DspError::AliasingRejected {
            sample_rate,
            required,
        });
    }
    Ok((sample_rate * duration).round() as usize)
}

fn add_noise(samples: &mut [f64], rms: f64, seed: u64) {
    if rms <= 0.0 {
        return;
    }
    let noise = gaussian_noise(rms, samples.len(), seed);
    for (s, g) in samples.iter_mut().zip(noise) {
        *s += g;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psd::{measure_snr, power_spectrum};

    /// Operating point used across the heterodyne tests: on-resonance lasers,
    /// natural decay plus transit-style dephasing of the Rydberg coherences so
    /// the atomic response tracks ~10 kHz beats quasi-statically.
    fn receiver() -> HeterodyneReceiver {
        let deph = TAU * 200.0e3;
        let sys = LadderSystem {
            omega_p: TAU * 1.0e6,
            omega_c: TAU * 5.0e6,
            gamma: [TAU * 5.2e6, TAU * 1.0e3, TAU * 1.0e3],
            gamma_deph: [0.0, deph, deph, deph, deph, deph],
            ..LadderSystem::default()
        };
        let mu = 2000.0 * crate::inference::EA0;
        HeterodyneReceiver::new(sys, mu).unwrap()
    }

    #[test]
    fn total_field_zero_signal_is_constant() {
        let tone = ToneSpec::beacon(1000.0, 0.0, 0.3);
        for t in [0.0, 1.3e-4, 0.72] {
            assert_eq!(total_field(0.2, &tone, t), 0.2);
        }
    }

    #[test]
    fn total_field_at_time_zero() {
        let tone = ToneSpec::beacon(400.0e3, 0.05, 0.0);
        assert!((total_field(0.2, &tone, 0.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn total_field_averages_to_local_over_beat_periods() {
        let tone = ToneSpec::beacon(10.0e3, 0.04, 1.1);
        let periods = 50;
        let steps_per_period = 1000;
        let n = periods * steps_per_period;
        let dt = 1.0 / (10.0e3 * steps_per_period as f64);
        // Midpoint rule over an integer number of periods.
        let mean: f64 = (0..n)
            .map(|i| total_field(0.2, &tone, (i as f64 + 0.5) * dt))
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.2).abs() < 1e-9, "mean {mean}");
    }

    #[test]
    fn sidebands_of_half_duty_square() {
        let tone = ToneSpec::square_modulated(400.0e3, 1.0, 0.0, 1000.0, 10.0e3);
        let bands = square_mod_sidebands(&tone, 5).unwrap();
        assert_eq!(bands.len(), 6);
        let expect = [
            (395.0e3, -13.979),
            (397.0e3, -9.542),
            (399.0e3, 0.0),
            (401.0e3, 0.0),
            (403.0e3, -9.542),
            (405.0e3, -13.979),
        ];
        for ((f, db), (ef, edb)) in bands.iter().zip(expect.iter()) {
            assert!((f - ef).abs() < 1e-6, "offset {f} vs {ef}");
            assert!((db - edb).abs() < 5e-3, "level {db} vs {edb}");
        }
    }

    #[test]
    fn sidebands_reject_beacon() {
        let tone = ToneSpec::beacon(400.0e3, 1.0, 0.0);
        assert_eq!(square_mod_sidebands(&tone, 5), Err(DspError::WrongKind));
    }

    #[test]
    fn seeded_noise_is_reproducible_and_sized() {
        let a = gaussian_noise(0.5, 10_001, 99);
        let b = gaussian_noise(0.5, 10_001, 99);
        assert_eq!(a, b);
        let rms = (a.iter().map(|x| x * x).sum::<f64>() / a.len() as f64).sqrt();
        assert!((rms - 0.5).abs() < 0.02, "sample rms {rms}");
    }

    #[test]
    fn trace_synthesis_is_deterministic() {
        let rx = receiver();
        let tone = ToneSpec::beacon(50.0e3, 1.0e-3, 0.0);
        let a = rx
            .synthesize_trace(0.24, &tone, 400.0e3, 0.02, 1.0e-4, 7)
            .unwrap();
        let b = rx
            .synthesize_trace(0.24, &tone, 400.0e3, 0.02, 1.0e-4, 7)
            .unwrap();
        assert_eq!(a.samples.len(), (400.0e3f64 * 0.02).round() as usize);
        assert!(a
            .samples
            .iter()
            .zip(b.samples.iter())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn noiseless_beacon_trace_peaks_at_offset() {
        let rx = receiver();
        let tone = ToneSpec::beacon(50.0e3, 2.0e-3, 0.4);
        let trace = rx
            .synthesize_trace(0.24, &tone, 400.0e3, 0.05, 0.0, 0)
            .unwrap();
        let spec = power_spectrum(&trace, 500.0).unwrap();
        // Ignore the DC region; the beat tone must dominate.
        let (k0, _) = spec
            .x()
            .iter()
            .enumerate()
            .find(|(_, x)| **x > 2000.0)
            .unwrap();
        let argmax = k0
            + spec.y()[k0..]
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
        assert!(
            (spec.x()[argmax] - 50.0e3).abs() <= 500.0,
            "beat at {}",
            spec.x()[argmax]
        );
    }

    #[test]
    fn aliasing_guard_rejects_low_sample_rate() {
        let rx = receiver();
        let tone = ToneSpec::beacon(300.0e3, 1.0e-3, 0.0);
        let err = rx
            .synthesize_trace(0.24, &tone, 500.0e3, 0.01, 0.0, 0)
            .unwrap_err();
        assert!(matches!(err, DspError::AliasingRejected { .. }));
    }

    #[test]
    fn slope_finite_difference_converges() {
        // Richardson check: halving the step must not move the slope beyond
        // the quadratic-convergence budget, and successive estimates agree
        // within 5%.
        let rx = receiver();
        let e_loc = 0.24;
        let s1 = rx.response_slope_with_step(e_loc, 4.0e-3).unwrap();
        let s2 = rx.response_slope_with_step(e_loc, 2.0e-3).unwrap();
        let s3 = rx.response_slope_with_step(e_loc, 1.0e-3).unwrap();
        assert!(
            (s1 - s2).abs() < 0.05 * s2.abs(),
            "h->h/2 moved {s1} -> {s2}"
        );
        assert!(
            (s2 - s3).abs() < 0.05 * s3.abs(),
            "h/2->h/4 moved {s2} -> {s3}"
        );
        // Richardson extrapolations from (s1, s2) and (s2, s3) agree too.
        let r12 = (4.0 * s2 - s1) / 3.0;
        let r23 = (4.0 * s3 - s2) / 3.0;
        assert!((r12 - r23).abs() < 0.05 * r23.abs());
    }

    #[test]
    fn exact_mode_agrees_with_linearized_on_beat_power() {
        let rx = receiver();
        let e_loc = 0.24;
        let tone = ToneSpec::beacon(10.0e3, e_loc / 200.0, 0.0);
        let fs = 200.0e3;
        let duration = 1.0e-3;
        let rbw = 2000.0;
        let linear = rx
            .synthesize_trace(e_loc, &tone, fs, duration, 0.0, 0)
            .unwrap();
        let exact = rx
            .synthesize_trace_exact(e_loc, &tone, fs, duration, 0.0, 0, 2.0e-9)
            .unwrap();
        let band = (8.0e3, 12.0e3);
        let p_lin = measure_snr(&power_spectrum(&linear, rbw).unwrap(), band)
            .unwrap()
            .signal_power;
        let p_exact = measure_snr(&power_spectrum(&exact, rbw).unwrap(), band)
            .unwrap()
            .signal_power;
        assert!(
            (p_lin - p_exact).abs() < 1.0,
            "beat power: linearized {p_lin} dB vs integrated {p_exact} dB"
        );
    }

    #[test]
    fn weak_signal_spectral_peak_linear_in_amplitude_squared() {
        let rx = receiver();
        let e_loc = 0.24;
        let fs = 200.0e3;
        let duration = 1.0e-3;
        let rbw = 2000.0;
        let mut anchors = Vec::new();
        for scale in [1.0e-4, 1.0e-3, 1.0e-2] {
            let tone = ToneSpec::beacon(10.0e3, e_loc * scale, 0.0);
            let trace = rx
                .synthesize_trace_exact(e_loc, &tone, fs, duration, 0.0, 0, 2.0e-9)
                .unwrap();
            let peak = measure_snr(&power_spectrum(&trace, rbw).unwrap(), (8.0e3, 12.0e3))
                .unwrap()
                .signal_power;
            anchors.push(peak - 20.0 * scale.log10());
        }
        for pair in anchors.windows(2) {
            assert!(
                (pair[0] - pair[1]).abs() < 0.2,
                "linearity anchors deviate: {anchors:?}"
            );
        }
    }
}
