//! Sweep the coupling-laser detuning and print EIT spectra: the bare
//! transparency peak, the resonant Autler-Townes doublet, and the asymmetric
//! doublet under a detuned microwave.
//!
//! ```bash
//! cargo run --release --example eit_spectrum
//! ```

use atomrx::eit::eit_spectrum;
use atomrx::spectrum::find_peaks;
use atomrx::LadderSystem;
use std::f64::consts::TAU;

fn main() {
    let base = LadderSystem {
        omega_p: TAU * 1.0e6,
        omega_c: TAU * 5.0e6,
        gamma: [TAU * 5.2e6, TAU * 100.0e3, TAU * 100.0e3],
        ..LadderSystem::default()
    };

    let cases = [
        ("field-free", 0.0, 0.0),
        ("resonant microwave, omega/2pi = 10 MHz", 10.0e6, 0.0),
        ("detuned microwave, delta/2pi = 22 MHz", 10.0e6, 22.0e6),
    ];

    for (label, omega_mw_hz, delta_mw_hz) in cases {
        let mut sys = base;
        sys.omega_mw = TAU * omega_mw_hz;
        sys.delta_mw = TAU * delta_mw_hz;
        let spec = eit_spectrum(&sys, (-32.0e6, 12.0e6), 881).expect("sweep");
        let peaks = find_peaks(&spec, 0.01);

        println!("{label}");
        for peak in peaks.iter().take(3) {
            println!(
                "  peak at {:+8.3} MHz, height {:.3}, prominence {:.3}",
                peak.x / 1e6,
                peak.height,
                peak.prominence
            );
        }
        if peaks.len() >= 2 {
            let separation = (peaks[0].x - peaks[1].x).abs();
            println!("  doublet separation {:.3} MHz", separation / 1e6);
            if delta_mw_hz > 0.0 {
                let dressed = (delta_mw_hz * delta_mw_hz + omega_mw_hz * omega_mw_hz).sqrt();
                println!(
                    "  dressed-state prediction sqrt(delta^2 + omega^2) = {:.3} MHz",
                    dressed / 1e6
                );
            }
        }
        println!();
    }
}
