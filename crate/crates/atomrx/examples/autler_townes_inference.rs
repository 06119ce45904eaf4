//! Invert Autler-Townes splittings back into field strengths: apply a known
//! microwave Rabi frequency, extract the doublet separation from the swept
//! spectrum, and compare the inferred field against the applied one.
//!
//! ```bash
//! cargo run --release --example autler_townes_inference
//! ```

use atomrx::eit::eit_spectrum;
use atomrx::inference::{field_from_splitting, splitting_from_spectrum, EA0, HBAR};
use atomrx::LadderSystem;
use std::f64::consts::TAU;

fn main() {
    let dipole = 2000.0 * EA0;
    let base = LadderSystem {
        omega_p: TAU * 1.0e6,
        omega_c: TAU * 5.0e6,
        gamma: [TAU * 5.2e6, TAU * 100.0e3, TAU * 100.0e3],
        ..LadderSystem::default()
    };

    println!("applied E (V/m)   splitting (MHz)   inferred E (V/m)   error");
    for omega_mhz in [8.0, 12.0, 20.0, 30.0] {
        let omega = TAU * omega_mhz * 1e6;
        let applied_field = HBAR * omega / dipole;

        let mut sys = base;
        sys.omega_mw = omega;
        let span = 1.2 * omega_mhz * 1e6;
        let spec = eit_spectrum(&sys, (-span, span), 801).expect("sweep");
        let splitting = splitting_from_spectrum(&spec, 0.05).expect("doublet");
        let inferred = field_from_splitting(splitting, dipole).expect("inversion");

        println!(
            "{:>14.4}   {:>15.3}   {:>16.4}   {:>5.2}%",
            applied_field,
            splitting / 1e6,
            inferred,
            100.0 * (inferred - applied_field).abs() / applied_field
        );
    }
    println!();
    println!("dipole moment: 2000 e*a0 = {:.4e} C*m", dipole);
}
