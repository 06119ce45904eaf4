//! Scenario files: flat, sectioned key-value documents describing one
//! reproducible experiment.
//!
//! Boundary units are Hz, dBm, meters, kelvin and seconds; conversion to the
//! solver's rad/s happens in the accessor methods (`ladder_system`, ...), so
//! units cross over exactly once. Unknown sections or keys are rejected with
//! their line number. Three fields are required and have no default:
//! `atomic.omega_p_hz`, `atomic.omega_c_hz` and `atomic.dipole_moment_ea0`.

use crate::atomic::LadderSystem;
use crate::eit::{BeamGeometry, DopplerAveraging};
use crate::heterodyne::ToneSpec;
use crate::link::{AntennaSpec, CavitySpec};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scenario: {field}: {message}")]
    Validation { field: String, message: String },
}

fn validation(field: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Atomic ladder parameters. Frequencies are ordinary (cycles/s) Hz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomicConfig {
    pub delta_p_hz: f64,
    pub delta_c_hz: f64,
    pub delta_mw_hz: f64,
    pub omega_p_hz: f64,
    pub omega_c_hz: f64,
    pub omega_mw_hz: f64,
    pub gamma_21_hz: f64,
    pub gamma_32_hz: f64,
    pub gamma_43_hz: f64,
    pub deph_12_hz: f64,
    pub deph_13_hz: f64,
    pub deph_14_hz: f64,
    pub deph_23_hz: f64,
    pub deph_24_hz: f64,
    pub deph_34_hz: f64,
    /// Rydberg-Rydberg transition dipole moment in units of e*a0.
    pub dipole_moment_ea0: f64,
    /// Rydberg-Rydberg resonance, bookkeeping only.
    pub mw_resonance_ghz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub delta_c_min_hz: f64,
    pub delta_c_max_hz: f64,
    pub n_points: usize,
    /// Peak prominence threshold as a fraction of the y range.
    pub prominence: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DopplerConfig {
    pub enabled: bool,
    pub temperature_k: f64,
    pub lambda_probe_nm: f64,
    pub lambda_coupling_nm: f64,
    pub n_velocity: usize,
    /// "counter" or "co".
    pub geometry: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeterodyneConfig {
    /// "beacon" or "square".
    pub kind: String,
    pub e_loc_v_per_m: f64,
    /// Signal field amplitude; 0 derives it from the link budget's received
    /// power through the calibration slope k.
    pub e_sig_v_per_m: f64,
    pub offset_hz: f64,
    pub phase_rad: f64,
    pub mod_rate_hz: f64,
    pub duty: f64,
    pub bandwidth_hz: f64,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    /// Field-equivalent white noise rms; used when `noise_from_floor` is off.
    pub noise_rms_v_per_m: f64,
    /// Derive the noise rms from the budget's noise floor and the
    /// calibration slope.
    pub noise_from_floor: bool,
    pub seed: u64,
    pub rbw_hz: f64,
    /// Half width of the SNR signal band; 0 picks a default per tone kind.
    pub signal_band_halfwidth_hz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub k_v_per_m_sqrt_w: f64,
    pub n_points: usize,
    pub power_min_dbm: f64,
    pub power_max_dbm: f64,
    /// Multiplicative Gaussian noise fraction on synthesized points.
    pub noise_pct: f64,
    pub seed: u64,
    pub max_linear_power_dbm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetConfig {
    pub tx_power_dbm: f64,
    /// The transmit power is an assumption, not a measured value.
    pub tx_power_assumed: bool,
    pub freq_mhz: f64,
    pub distance_km: f64,
    pub antenna_diameter_m: f64,
    pub aperture_efficiency: f64,
    pub wavelength_m: f64,
    pub cable_loss_db: f64,
    pub polarization_loss_db: f64,
    pub lna_gain_db: f64,
    pub cavity_q: f64,
    /// Fold the cavity term into the ledger. Off by default: the stated
    /// noise floor already reflects the cavity-assisted receiver.
    pub include_cavity: bool,
    /// Receiver noise floor at `floor_rbw_hz`, dBm.
    pub noise_floor_dbm: f64,
    pub floor_rbw_hz: f64,
    /// Externally reported SNR to echo as a comparison figure, dB.
    pub reported_snr_db: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub csv: String,
    pub summary: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub atomic: AtomicConfig,
    pub sweep: SweepConfig,
    pub doppler: DopplerConfig,
    pub heterodyne: HeterodyneConfig,
    pub calibration: CalibrationConfig,
    pub budget: BudgetConfig,
    pub output: OutputConfig,
}

impl Scenario {
    /// Ladder system in solver units (rad/s), the single Hz -> rad/s
    /// conversion point.
    pub fn ladder_system(&self) -> LadderSystem {
        let a = &self.atomic;
        LadderSystem {
            delta_p: TAU * a.delta_p_hz,
            delta_c: TAU * a.delta_c_hz,
            delta_mw: TAU * a.delta_mw_hz,
            omega_p: TAU * a.omega_p_hz,
            omega_c: TAU * a.omega_c_hz,
            omega_mw: TAU * a.omega_mw_hz,
            gamma: [
                TAU * a.gamma_21_hz,
                TAU * a.gamma_32_hz,
                TAU * a.gamma_43_hz,
            ],
            gamma_deph: [
                TAU * a.deph_12_hz,
                TAU * a.deph_13_hz,
                TAU * a.deph_14_hz,
                TAU * a.deph_23_hz,
                TAU * a.deph_24_hz,
                TAU * a.deph_34_hz,
            ],
        }
    }

    /// Dipole moment in C*m.
    pub fn dipole_moment(&self) -> f64 {
        self.atomic.dipole_moment_ea0 * crate::inference::EA0
    }

    pub fn doppler_averaging(&self) -> Option<DopplerAveraging> {
        if !self.doppler.enabled {
            return None;
        }
        let d = &self.doppler;
        let geometry = if d.geometry == "co" {
            BeamGeometry::CoPropagating
        } else {
            BeamGeometry::CounterPropagating
        };
        Some(
            DopplerAveraging::new(
                d.temperature_k,
                d.lambda_probe_nm * 1e-9,
                d.lambda_coupling_nm * 1e-9,
                d.n_velocity,
            )
            .with_geometry(geometry),
        )
    }

    /// Tone description with an explicit signal amplitude (V/m).
    pub fn tone_spec(&self, e_sig: f64) -> ToneSpec {
        let h = &self.heterodyne;
        let mut tone = if h.kind == "square" {
            ToneSpec::square_modulated(
                h.offset_hz,
                e_sig,
                h.phase_rad,
                h.mod_rate_hz,
                h.bandwidth_hz,
            )
        } else {
            ToneSpec::beacon(h.offset_hz, e_sig, h.phase_rad)
        };
        tone.duty = h.duty;
        tone
    }

    pub fn is_square(&self) -> bool {
        self.heterodyne.kind == "square"
    }

    pub fn antenna_spec(&self) -> AntennaSpec {
        AntennaSpec {
            diameter: self.budget.antenna_diameter_m,
            aperture_efficiency: self.budget.aperture_efficiency,
            fixed_losses: Vec::new(),
        }
    }

    pub fn cavity_spec(&self) -> CavitySpec {
        CavitySpec {
            q_factor: self.budget.cavity_q,
            mode: "TE101".to_string(),
        }
    }

    /// SNR signal band around the tone offset.
    pub fn signal_band(&self) -> (f64, f64) {
        let h = &self.heterodyne;
        let half = if h.signal_band_halfwidth_hz > 0.0 {
            h.signal_band_halfwidth_hz
        } else if self.is_square() {
            (h.bandwidth_hz / 2.0).max(2.0 * h.rbw_hz)
        } else {
            50.0 * h.rbw_hz
        };
        (h.offset_hz - half, h.offset_hz + half)
    }

    /// Noise floor restated at the heterodyne analysis RBW (white-noise
    /// scaling from the floor's own reference bandwidth).
    pub fn floor_at_analysis_rbw(&self) -> f64 {
        self.budget.noise_floor_dbm
            + 10.0 * (self.heterodyne.rbw_hz / self.budget.floor_rbw_hz).log10()
    }

    /// Compose the satellite-to-receiver ledger from the budget section:
    /// path loss, raw antenna gain, cable and polarization losses, then the
    /// optional LNA and cavity terms, against the floor at the analysis RBW.
    pub fn link_budget(&self) -> Result<crate::link::LinkBudget, crate::link::LinkError> {
        let b = &self.budget;
        let loss = crate::link::path_loss(b.freq_mhz, b.distance_km)?;
        let gain = crate::link::antenna_gain(&self.antenna_spec(), b.wavelength_m)?;
        let mut terms = vec![
            ("path-loss".to_string(), loss),
            ("antenna-gain".to_string(), gain),
        ];
        if b.cable_loss_db != 0.0 {
            terms.push(("cable-loss".to_string(), b.cable_loss_db));
        }
        if b.polarization_loss_db != 0.0 {
            terms.push(("polarization-loss".to_string(), b.polarization_loss_db));
        }
        if b.lna_gain_db != 0.0 {
            terms.push(("lna-gain".to_string(), b.lna_gain_db));
        }
        if b.include_cavity {
            let enhancement = crate::link::cavity_circulated_power(0.0, &self.cavity_spec());
            terms.push(("cavity-gain".to_string(), enhancement));
        }
        Ok(crate::link::compose_budget(
            b.tx_power_dbm,
            terms,
            self.floor_at_analysis_rbw(),
        ))
    }

    /// Signal field amplitude equivalent to a received power, through the
    /// calibration slope: `E = k sqrt(P)`.
    pub fn e_sig_for_rx_power(&self, rx_power_dbm: f64) -> f64 {
        self.calibration.k_v_per_m_sqrt_w * crate::link::dbm_to_watts(rx_power_dbm).sqrt()
    }

    /// Field-equivalent white-noise rms reproducing the receiver noise floor.
    ///
    /// A floor of `P_floor` dBm in `floor_rbw` corresponds to a field
    /// amplitude `E_n = k sqrt(P_floor)`; matching the amplitude-equivalent
    /// noise power `E_n^2/2` inside `floor_rbw` against a white PSD spread
    /// over the Nyquist band gives `rms = E_n sqrt(fs / (4 floor_rbw))`.
    pub fn noise_rms_from_floor(&self) -> f64 {
        let e_floor = self.e_sig_for_rx_power(self.budget.noise_floor_dbm);
        e_floor * (self.heterodyne.sample_rate_hz / (4.0 * self.budget.floor_rbw_hz)).sqrt()
    }
}

/// Parsed raw document: (section, key) -> (line, value).
type RawDoc = BTreeMap<(String, String), (usize, String)>;

const SECTIONS: &[&str] = &[
    "atomic",
    "sweep",
    "doppler",
    "heterodyne",
    "calibration",
    "budget",
    "output",
];

/// Parse and validate a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut doc: RawDoc = BTreeMap::new();
    let mut section = String::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| ScenarioError::Parse {
                line: line_no,
                message: format!("malformed section header `{line}`"),
            })?;
            if !SECTIONS.contains(&name) {
                return Err(ScenarioError::Parse {
                    line: line_no,
                    message: format!("unknown section `[{name}]`"),
                });
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ScenarioError::Parse {
            line: line_no,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(ScenarioError::Parse {
                line: line_no,
                message: "empty key".to_string(),
            });
        }
        if doc
            .insert((section.clone(), key.clone()), (line_no, value))
            .is_some()
        {
            return Err(ScenarioError::Parse {
                line: line_no,
                message: format!("duplicate key `{key}`"),
            });
        }
    }
    build_scenario(&mut doc)
}

struct Section<'a> {
    doc: &'a mut RawDoc,
    name: &'static str,
}

impl Section<'_> {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.doc.remove(&(self.name.to_string(), key.to_string()))
    }

    fn field(&self, key: &str) -> String {
        if self.name.is_empty() {
            key.to_string()
        } else {
            format!("{}.{}", self.name, key)
        }
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64, ScenarioError> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn f64_opt(&mut self, key: &str) -> Result<Option<f64>, ScenarioError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, value)) => {
                value
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| ScenarioError::Parse {
                        line,
                        message: format!("{}: expected a number, got `{value}`", self.field(key)),
                    })
            }
        }
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize, ScenarioError> {
        match self.take(key) {
            None => Ok(default),
            Some((line, value)) => value.parse::<usize>().map_err(|_| ScenarioError::Parse {
                line,
                message: format!("{}: expected an integer, got `{value}`", self.field(key)),
            }),
        }
    }

    fn u64(&mut self, key: &str, default: u64) -> Result<u64, ScenarioError> {
        match self.take(key) {
            None => Ok(default),
            Some((line, value)) => value.parse::<u64>().map_err(|_| ScenarioError::Parse {
                line,
                message: format!("{}: expected an integer, got `{value}`", self.field(key)),
            }),
        }
    }

    fn bool(&mut self, key: &str, default: bool) -> Result<bool, ScenarioError> {
        match self.take(key) {
            None => Ok(default),
            Some((line, value)) => match value.as_str() {
                "true" | "yes" | "on" => Ok(true),
                "false" | "no" | "off" => Ok(false),
                _ => Err(ScenarioError::Parse {
                    line,
                    message: format!("{}: expected true/false, got `{value}`", self.field(key)),
                }),
            },
        }
    }

    fn string(&mut self, key: &str, default: &str) -> String {
        self.take(key)
            .map(|(_, v)| v)
            .unwrap_or_else(|| default.to_string())
    }
}

fn build_scenario(doc: &mut RawDoc) -> Result<Scenario, ScenarioError> {
    let mut top = Section { doc, name: "" };
    let name = top.string("name", "unnamed");

    let mut sec = Section {
        doc,
        name: "atomic",
    };
    let omega_p_hz = sec.f64_opt("omega_p_hz")?;
    let omega_c_hz = sec.f64_opt("omega_c_hz")?;
    let dipole = sec.f64_opt("dipole_moment_ea0")?;
    let atomic = AtomicConfig {
        delta_p_hz: sec.f64("delta_p_hz", 0.0)?,
        delta_c_hz: sec.f64("delta_c_hz", 0.0)?,
        delta_mw_hz: sec.f64("delta_mw_hz", 0.0)?,
        omega_p_hz: omega_p_hz.unwrap_or(f64::NAN),
        omega_c_hz: omega_c_hz.unwrap_or(f64::NAN),
        omega_mw_hz: sec.f64("omega_mw_hz", 0.0)?,
        gamma_21_hz: sec.f64("gamma_21_hz", 5.2e6)?,
        gamma_32_hz: sec.f64("gamma_32_hz", 1.0e3)?,
        gamma_43_hz: sec.f64("gamma_43_hz", 1.0e3)?,
        deph_12_hz: sec.f64("deph_12_hz", 0.0)?,
        deph_13_hz: sec.f64("deph_13_hz", 0.0)?,
        deph_14_hz: sec.f64("deph_14_hz", 0.0)?,
        deph_23_hz: sec.f64("deph_23_hz", 0.0)?,
        deph_24_hz: sec.f64("deph_24_hz", 0.0)?,
        deph_34_hz: sec.f64("deph_34_hz", 0.0)?,
        dipole_moment_ea0: dipole.unwrap_or(f64::NAN),
        mw_resonance_ghz: sec.f64("mw_resonance_ghz", 3.778)?,
    };

    let mut sec = Section { doc, name: "sweep" };
    let sweep = SweepConfig {
        delta_c_min_hz: sec.f64("delta_c_min_hz", -30.0e6)?,
        delta_c_max_hz: sec.f64("delta_c_max_hz", 30.0e6)?,
        n_points: sec.usize("n_points", 601)?,
        prominence: sec.f64("prominence", 0.02)?,
    };

    let mut sec = Section {
        doc,
        name: "doppler",
    };
    let doppler = DopplerConfig {
        enabled: sec.bool("enabled", false)?,
        temperature_k: sec.f64("temperature_k", 300.0)?,
        lambda_probe_nm: sec.f64("lambda_probe_nm", 852.357)?,
        lambda_coupling_nm: sec.f64("lambda_coupling_nm", 509.236)?,
        n_velocity: sec.usize("n_velocity", 1501)?,
        geometry: sec.string("geometry", "counter"),
    };

    let mut sec = Section {
        doc,
        name: "heterodyne",
    };
    let heterodyne = HeterodyneConfig {
        kind: sec.string("kind", "beacon"),
        e_loc_v_per_m: sec.f64("e_loc_v_per_m", 0.239)?,
        e_sig_v_per_m: sec.f64("e_sig_v_per_m", 0.0)?,
        offset_hz: sec.f64("offset_hz", 400.0e3)?,
        phase_rad: sec.f64("phase_rad", 0.0)?,
        mod_rate_hz: sec.f64("mod_rate_hz", 1500.0)?,
        duty: sec.f64("duty", 0.5)?,
        bandwidth_hz: sec.f64("bandwidth_hz", 15.0e3)?,
        sample_rate_hz: sec.f64("sample_rate_hz", 2.0e6)?,
        duration_s: sec.f64("duration_s", 2.0)?,
        noise_rms_v_per_m: sec.f64("noise_rms_v_per_m", 0.0)?,
        noise_from_floor: sec.bool("noise_from_floor", true)?,
        seed: sec.u64("seed", 1)?,
        rbw_hz: sec.f64("rbw_hz", 1.0)?,
        signal_band_halfwidth_hz: sec.f64("signal_band_halfwidth_hz", 0.0)?,
    };

    let mut sec = Section {
        doc,
        name: "calibration",
    };
    let calibration = CalibrationConfig {
        k_v_per_m_sqrt_w: sec.f64("k_v_per_m_sqrt_w", 169.27)?,
        n_points: sec.usize("n_points", 25)?,
        power_min_dbm: sec.f64("power_min_dbm", -60.0)?,
        power_max_dbm: sec.f64("power_max_dbm", -10.0)?,
        noise_pct: sec.f64("noise_pct", 0.0)?,
        seed: sec.u64("seed", 7)?,
        max_linear_power_dbm: sec.f64("max_linear_power_dbm", -25.0)?,
    };

    let mut sec = Section {
        doc,
        name: "budget",
    };
    let budget = BudgetConfig {
        tx_power_dbm: sec.f64("tx_power_dbm", 47.0)?,
        tx_power_assumed: sec.bool("tx_power_assumed", true)?,
        freq_mhz: sec.f64("freq_mhz", 3800.0)?,
        distance_km: sec.f64("distance_km", 36000.0)?,
        antenna_diameter_m: sec.f64("antenna_diameter_m", 16.0)?,
        aperture_efficiency: sec.f64("aperture_efficiency", 0.7)?,
        wavelength_m: sec.f64("wavelength_m", 0.0788)?,
        cable_loss_db: sec.f64("cable_loss_db", -3.0)?,
        polarization_loss_db: sec.f64("polarization_loss_db", -3.0)?,
        lna_gain_db: sec.f64("lna_gain_db", 0.0)?,
        cavity_q: sec.f64("cavity_q", 1.0)?,
        include_cavity: sec.bool("include_cavity", false)?,
        noise_floor_dbm: sec.f64("noise_floor_dbm", -128.0)?,
        floor_rbw_hz: sec.f64("floor_rbw_hz", 1.0)?,
        reported_snr_db: sec.f64_opt("reported_snr_db")?,
    };

    let mut sec = Section {
        doc,
        name: "output",
    };
    let output = OutputConfig {
        csv: sec.string("csv", "output.csv"),
        summary: sec.string("summary", "summary.json"),
    };

    if let Some(((section, key), (line, _))) = doc.iter().next() {
        let field = if section.is_empty() {
            key.clone()
        } else {
            format!("{section}.{key}")
        };
        return Err(ScenarioError::Parse {
            line: *line,
            message: format!("unknown key `{field}`"),
        });
    }

    let scenario = Scenario {
        name,
        atomic,
        sweep,
        doppler,
        heterodyne,
        calibration,
        budget,
        output,
    };
    validate(&scenario)?;
    Ok(scenario)
}

fn validate(s: &Scenario) -> Result<(), ScenarioError> {
    let missing: Vec<&str> = [
        ("atomic.omega_p_hz", s.atomic.omega_p_hz),
        ("atomic.omega_c_hz", s.atomic.omega_c_hz),
        ("atomic.dipole_moment_ea0", s.atomic.dipole_moment_ea0),
    ]
    .iter()
    .filter(|(_, v)| v.is_nan())
    .map(|(name, _)| *name)
    .collect();
    if !missing.is_empty() {
        return Err(validation(&missing.join(", "), "required field(s) missing"));
    }

    let a = &s.atomic;
    for (field, value) in [
        ("atomic.omega_p_hz", a.omega_p_hz),
        ("atomic.omega_c_hz", a.omega_c_hz),
        ("atomic.omega_mw_hz", a.omega_mw_hz),
        ("atomic.gamma_21_hz", a.gamma_21_hz),
        ("atomic.gamma_32_hz", a.gamma_32_hz),
        ("atomic.gamma_43_hz", a.gamma_43_hz),
        ("atomic.deph_12_hz", a.deph_12_hz),
        ("atomic.deph_13_hz", a.deph_13_hz),
        ("atomic.deph_14_hz", a.deph_14_hz),
        ("atomic.deph_23_hz", a.deph_23_hz),
        ("atomic.deph_24_hz", a.deph_24_hz),
        ("atomic.deph_34_hz", a.deph_34_hz),
    ] {
        if !value.is_finite() || value < 0.0 {
            return Err(validation(field, "must be finite and >= 0"));
        }
    }
    if !(a.dipole_moment_ea0 > 0.0) {
        return Err(validation("atomic.dipole_moment_ea0", "must be > 0"));
    }

    if !(s.sweep.delta_c_min_hz < s.sweep.delta_c_max_hz) {
        return Err(validation(
            "sweep.delta_c_min_hz",
            "sweep range must satisfy min < max",
        ));
    }
    if s.sweep.n_points < 3 {
        return Err(validation("sweep.n_points", "need at least 3 points"));
    }
    if !(s.sweep.prominence > 0.0 && s.sweep.prominence < 1.0) {
        return Err(validation("sweep.prominence", "must be in (0, 1)"));
    }

    let d = &s.doppler;
    if d.enabled {
        if !(d.temperature_k > 0.0) {
            return Err(validation("doppler.temperature_k", "must be > 0"));
        }
        if d.n_velocity < 11 || d.n_velocity.is_multiple_of(2) {
            return Err(validation("doppler.n_velocity", "must be odd and >= 11"));
        }
        if d.geometry != "counter" && d.geometry != "co" {
            return Err(validation("doppler.geometry", "must be `counter` or `co`"));
        }
        if !(d.lambda_probe_nm > 0.0) || !(d.lambda_coupling_nm > 0.0) {
            return Err(validation("doppler.lambda_probe_nm", "must be > 0"));
        }
    }

    let h = &s.heterodyne;
    if h.kind != "beacon" && h.kind != "square" {
        return Err(validation(
            "heterodyne.kind",
            "must be `beacon` or `square`",
        ));
    }
    if !(h.e_loc_v_per_m > 0.0) {
        return Err(validation("heterodyne.e_loc_v_per_m", "must be > 0"));
    }
    if h.e_sig_v_per_m < 0.0 {
        return Err(validation("heterodyne.e_sig_v_per_m", "must be >= 0"));
    }
    if h.offset_hz < 0.0 {
        return Err(validation("heterodyne.offset_hz", "must be >= 0"));
    }
    if h.kind == "square" && !(h.mod_rate_hz > 0.0) {
        return Err(validation("heterodyne.mod_rate_hz", "must be > 0"));
    }
    if !(h.duty > 0.0 && h.duty < 1.0) {
        return Err(validation("heterodyne.duty", "must be in (0, 1)"));
    }
    if !(h.sample_rate_hz > 0.0) {
        return Err(validation("heterodyne.sample_rate_hz", "must be > 0"));
    }
    if !(h.duration_s > 0.0) {
        return Err(validation("heterodyne.duration_s", "must be > 0"));
    }
    if h.noise_rms_v_per_m < 0.0 {
        return Err(validation("heterodyne.noise_rms_v_per_m", "must be >= 0"));
    }
    if !(h.rbw_hz > 0.0) {
        return Err(validation("heterodyne.rbw_hz", "must be > 0"));
    }

    let c = &s.calibration;
    if !(c.k_v_per_m_sqrt_w > 0.0) {
        return Err(validation("calibration.k_v_per_m_sqrt_w", "must be > 0"));
    }
    if c.n_points < 2 {
        return Err(validation("calibration.n_points", "need at least 2 points"));
    }
    if !(c.power_min_dbm < c.power_max_dbm) {
        return Err(validation(
            "calibration.power_min_dbm",
            "power range must satisfy min < max",
        ));
    }
    if c.noise_pct < 0.0 {
        return Err(validation("calibration.noise_pct", "must be >= 0"));
    }

    let b = &s.budget;
    if !(b.freq_mhz > 0.0) {
        return Err(validation("budget.freq_mhz", "must be > 0"));
    }
    if !(b.distance_km > 0.0) {
        return Err(validation("budget.distance_km", "must be > 0"));
    }
    if !(b.antenna_diameter_m > 0.0) {
        return Err(validation("budget.antenna_diameter_m", "must be > 0"));
    }
    if !(b.aperture_efficiency > 0.0 && b.aperture_efficiency <= 1.0) {
        return Err(validation(
            "budget.aperture_efficiency",
            "must be in (0, 1]",
        ));
    }
    if !(b.wavelength_m > 0.0) {
        return Err(validation("budget.wavelength_m", "must be > 0"));
    }
    if !(b.cavity_q >= 1.0) {
        return Err(validation("budget.cavity_q", "must be >= 1"));
    }
    if !(b.floor_rbw_hz > 0.0) {
        return Err(validation("budget.floor_rbw_hz", "must be > 0"));
    }
    if b.cable_loss_db > 0.0 || b.polarization_loss_db > 0.0 {
        return Err(validation("budget.cable_loss_db", "losses must be <= 0 dB"));
    }

    if s.output.csv.is_empty() || s.output.summary.is_empty() {
        return Err(validation("output.csv", "output paths must be nonempty"));
    }
    Ok(())
}
