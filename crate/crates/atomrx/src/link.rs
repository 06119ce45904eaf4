//! Satellite-to-receiver power ledger: free-space path loss, parabolic
//! antenna gain, cavity enhancement, and end-to-end SNR prediction.
//!
//! All composition is exact dB arithmetic; absolute anchors are dBm.

use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinkError {
    #[error("{0} must be > 0")]
    NonpositiveInput(&'static str),
}

/// Parabolic receive antenna with aperture efficiency and fixed losses
/// (cables, polarization conversion) folded into the effective gain.
#[derive(Clone, Debug, Serialize)]
pub struct AntennaSpec {
    /// Dish diameter, m.
    pub diameter: f64,
    /// Aperture efficiency in (0, 1].
    pub aperture_efficiency: f64,
    /// Fixed losses applied after the raw gain, dB (negative values).
    pub fixed_losses: Vec<(String, f64)>,
}

/// Rectangular microwave cavity acting as a passive power multiplier.
#[derive(Clone, Debug, Serialize)]
pub struct CavitySpec {
    /// Quality factor, >= 1.
    pub q_factor: f64,
    /// Resonant mode label, e.g. "TE101".
    pub mode: String,
}

/// Ordered gain/loss ledger from transmitter to receiver.
#[derive(Clone, Debug, Serialize)]
pub struct LinkBudget {
    pub tx_power: f64,
    /// Ordered (label, dB) terms; display order only, the total is
    /// order-independent.
    pub terms: Vec<(String, f64)>,
    /// tx_power plus the sum of all terms, dBm.
    pub rx_power: f64,
    /// Receiver noise floor at the stated resolution bandwidth, dBm.
    pub noise_floor: f64,
    /// rx_power - noise_floor, dB.
    pub predicted_snr: f64,
}

impl LinkBudget {
    /// Cumulative power after the named term, walking the ledger in order.
    pub fn power_after(&self, label: &str) -> Option<f64> {
        let mut acc = self.tx_power;
        for (name, db) in &self.terms {
            acc += db;
            if name == label {
                return Some(acc);
            }
        }
        None
    }

    /// Cumulative power after each term, in ledger order.
    pub fn checkpoints(&self) -> Vec<(String, f64)> {
        let mut acc = self.tx_power;
        self.terms
            .iter()
            .map(|(name, db)| {
                acc += db;
                (name.clone(), acc)
            })
            .collect()
    }
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10.0f64.powf((dbm - 30.0) / 10.0)
}

/// Watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Free-space path loss (negative dB): `-32.5 - 20 log10(f) - 20 log10(d)`
/// with `f` in MHz and `d` in km.
pub fn path_loss(freq_mhz: f64, distance_km: f64) -> Result<f64, LinkError> {
    if !(freq_mhz > 0.0) {
        return Err(LinkError::NonpositiveInput("freq_mhz"));
    }
    if !(distance_km > 0.0) {
        return Err(LinkError::NonpositiveInput("distance_km"));
    }
    Ok(-32.5 - 20.0 * freq_mhz.log10() - 20.0 * distance_km.log10())
}

/// Effective antenna gain in dB: `10 log10(e_A (pi d / lambda)^2)` plus the
/// spec's fixed losses.
pub fn antenna_gain(spec: &AntennaSpec, wavelength_m: f64) -> Result<f64, LinkError> {
    if !(wavelength_m > 0.0) {
        return Err(LinkError::NonpositiveInput("wavelength_m"));
    }
    if !(spec.diameter > 0.0) {
        return Err(LinkError::NonpositiveInput("diameter"));
    }
    if !(spec.aperture_efficiency > 0.0 && spec.aperture_efficiency <= 1.0) {
        return Err(LinkError::NonpositiveInput("aperture_efficiency"));
    }
    let ratio = PI * spec.diameter / wavelength_m;
    let raw = 10.0 * (spec.aperture_efficiency * ratio * ratio).log10();
    let losses: f64 = spec.fixed_losses.iter().map(|(_, db)| db).sum();
    Ok(raw + losses)
}

/// Power circulating in the cavity: `p_in + 10 log10(Q)` dBm.
pub fn cavity_circulated_power(p_in_dbm: f64, cavity: &CavitySpec) -> f64 {
    debug_assert!(cavity.q_factor >= 1.0, "q_factor must be >= 1");
    p_in_dbm + 10.0 * cavity.q_factor.log10()
}

/// Compose the ledger: exact dB sums, rx power, and predicted SNR against
/// the stated noise floor.
pub fn compose_budget(
    tx_power_dbm: f64,
    terms: Vec<(String, f64)>,
    noise_floor_dbm: f64,
) -> LinkBudget {
    debug_assert!(terms.iter().all(|(_, db)| db.is_finite()));
    let rx_power = tx_power_dbm + terms.iter().map(|(_, db)| db).sum::<f64>();
    LinkBudget {
        tx_power: tx_power_dbm,
        terms,
        rx_power,
        noise_floor: noise_floor_dbm,
        predicted_snr: rx_power - noise_floor_dbm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_antenna() -> AntennaSpec {
        AntennaSpec {
            diameter: 16.0,
            aperture_efficiency: 0.7,
            fixed_losses: Vec::new(),
        }
    }

    #[test]
    fn path_loss_geo_c_band() {
        let loss = path_loss(3800.0, 36000.0).unwrap();
        assert!((loss + 195.2217).abs() < 1e-3, "loss {loss}");
    }

    #[test]
    fn path_loss_log_terms_vanish() {
        assert!((path_loss(1.0, 1.0).unwrap() + 32.5).abs() < 1e-12);
    }

    #[test]
    fn path_loss_distance_doubling() {
        let near = path_loss(3800.0, 1000.0).unwrap();
        let far = path_loss(3800.0, 2000.0).unwrap();
        assert!((near - far - 20.0 * 2.0f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn path_loss_rejects_nonpositive() {
        assert!(path_loss(0.0, 100.0).is_err());
        assert!(path_loss(100.0, -5.0).is_err());
    }

    #[test]
    fn antenna_gain_16m_dish() {
        let gain = antenna_gain(&paper_antenna(), 0.0788).unwrap();
        assert!((gain - 54.5456).abs() < 0.01, "raw gain {gain}");
    }

    #[test]
    fn antenna_gain_with_fixed_losses() {
        let mut spec = paper_antenna();
        spec.fixed_losses = vec![("cable".into(), -3.0), ("polarization".into(), -3.0)];
        let gain = antenna_gain(&spec, 0.0788).unwrap();
        assert!((gain - 48.5456).abs() < 0.01, "effective gain {gain}");
    }

    #[test]
    fn antenna_unit_gain_aperture() {
        let spec = AntennaSpec {
            diameter: 0.0788 / PI,
            aperture_efficiency: 1.0,
            fixed_losses: Vec::new(),
        };
        let gain = antenna_gain(&spec, 0.0788).unwrap();
        assert!(gain.abs() < 1e-10, "gain {gain}");
    }

    #[test]
    fn cavity_power_multiplication() {
        let unity = CavitySpec {
            q_factor: 1.0,
            mode: "TE101".into(),
        };
        assert_eq!(cavity_circulated_power(-128.0, &unity), -128.0);
        let q100 = CavitySpec {
            q_factor: 100.0,
            mode: "TE101".into(),
        };
        assert!((cavity_circulated_power(-128.0, &q100) + 108.0).abs() < 1e-12);
        let q1000 = CavitySpec {
            q_factor: 1000.0,
            mode: "TE101".into(),
        };
        assert!((cavity_circulated_power(0.0, &q1000) - 30.0).abs() < 1e-12);
    }

    #[test]
    fn beacon_budget_checkpoints() {
        let path = path_loss(3800.0, 36000.0).unwrap();
        let mut antenna = paper_antenna();
        antenna.fixed_losses = vec![("cable".into(), -3.0), ("polarization".into(), -3.0)];
        let gain = antenna_gain(&antenna, 0.0788).unwrap();
        let budget = compose_budget(
            47.0,
            vec![("path-loss".into(), path), ("antenna-gain".into(), gain)],
            -128.0,
        );
        let ground = budget.power_after("path-loss").unwrap();
        assert!((ground + 148.22).abs() < 0.5, "ground level {ground}");
        assert!(
            (budget.rx_power + 99.68).abs() < 0.5,
            "rx {}",
            budget.rx_power
        );
        assert!(
            (budget.predicted_snr - 28.32).abs() < 0.5,
            "snr {}",
            budget.predicted_snr
        );
    }

    #[test]
    fn empty_terms_pass_tx_through() {
        let budget = compose_budget(47.0, Vec::new(), -128.0);
        assert_eq!(budget.rx_power, 47.0);
        assert_eq!(budget.predicted_snr, 175.0);
    }

    #[test]
    fn round_trip_consistency() {
        let l = -195.2217;
        let g = 48.5456;
        let budget = compose_budget(47.0, vec![("L".into(), l), ("G".into(), g)], -128.0);
        let lhs = budget.predicted_snr + budget.noise_floor - budget.tx_power;
        assert!((lhs - (l + g)).abs() < 1e-12);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rx_power_is_order_independent(
                tx in -50.0f64..60.0,
                terms in proptest::collection::vec(-200.0f64..60.0, 1..8),
            ) {
                let named: Vec<(String, f64)> = terms
                    .iter()
                    .enumerate()
                    .map(|(i, db)| (format!("t{i}"), *db))
                    .collect();
                let mut reversed = named.clone();
                reversed.reverse();
                let a = compose_budget(tx, named, -128.0);
                let b = compose_budget(tx, reversed, -128.0);
                prop_assert!((a.rx_power - b.rx_power).abs() < 1e-9);
            }

            #[test]
            fn path_loss_distance_scaling_exact(
                f in 1.0f64..1.0e5,
                d in 1.0f64..1.0e5,
                a in 1.01f64..1.0e3,
            ) {
                let base = path_loss(f, d).unwrap();
                let scaled = path_loss(f, a * d).unwrap();
                prop_assert!((scaled - (base - 20.0 * a.log10())).abs() < 1e-9);
            }

            #[test]
            fn antenna_gain_monotone(
                d in 0.1f64..100.0,
                lambda in 0.001f64..1.0,
            ) {
                let small = AntennaSpec {
                    diameter: d,
                    aperture_efficiency: 0.7,
                    fixed_losses: Vec::new(),
                };
                let large = AntennaSpec {
                    diameter: d * 1.5,
                    aperture_efficiency: 0.7,
                    fixed_losses: Vec::new(),
                };
                let g_small = antenna_gain(&small, lambda).unwrap();
                let g_large = antenna_gain(&large, lambda).unwrap();
                prop_assert!(g_large > g_small);
                let g_longer = antenna_gain(&small, lambda * 2.0).unwrap();
                prop_assert!(g_longer < g_small);
            }
        }
    }
}
