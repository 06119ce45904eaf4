//! Fit the field-versus-power calibration E = k*sqrt(P) on synthetic
//! measurements and turn the receiver noise floor into a sensitivity figure.
//!
//! ```bash
//! cargo run --release --example calibration_and_sensitivity
//! ```

use atomrx::heterodyne::gaussian_noise;
use atomrx::inference::{fit_calibration, sensitivity_report};
use atomrx::link::dbm_to_watts;

fn main() {
    let k_true = 169.27; // V/m per sqrt(W)
    let noise = gaussian_noise(0.01, 25, 42);
    let points: Vec<(f64, f64)> = (0..25)
        .map(|i| {
            let dbm = -60.0 + 50.0 * i as f64 / 24.0;
            let p = dbm_to_watts(dbm);
            (p, k_true * p.sqrt() * (1.0 + noise[i]))
        })
        .collect();

    let cal = fit_calibration(&points).expect("fit");
    println!("calibration fit over {} points (1% noise):", cal.n_points);
    println!("  k     = {:.4} V/m/sqrt(W)  (true {k_true})", cal.k);
    println!("  R^2   = {:.6}", cal.fit_r2);
    let rms =
        (cal.residuals.iter().map(|r| r * r).sum::<f64>() / cal.residuals.len() as f64).sqrt();
    println!("  rms residual = {rms:.3e} V/m");

    // The -128 dBm floor at 1 Hz RBW maps to a minimum detectable field.
    let floor_dbm = -128.0;
    let e_min = cal.k * dbm_to_watts(floor_dbm).sqrt();
    let report = sensitivity_report(e_min, 1.0, floor_dbm, -25.0).expect("report");
    println!();
    println!("sensitivity at the {floor_dbm} dBm floor:");
    println!(
        "  E_min         = {:.3e} V/m ({:.1} nV/cm)",
        report.e_min,
        report.e_min * 1e9 / 100.0
    );
    println!(
        "  sensitivity   = {:.3e} V/m/sqrt(Hz) ({:.1} nV/cm/sqrt(Hz))",
        report.sensitivity,
        report.sensitivity * 1e9 / 100.0
    );
    println!("  dynamic range = {:.0} dB", report.dynamic_range);
}
