//! Synthesize the superheterodyne beat: a weak signal tone rides on the
//! strong local microwave, the atomic response down-converts it to baseband,
//! and the Welch spectrum shows the beat line over the noise floor.
//!
//! ```bash
//! cargo run --release --example superheterodyne_beat
//! ```

use atomrx::heterodyne::{HeterodyneReceiver, ToneSpec};
use atomrx::inference::EA0;
use atomrx::psd::{measure_snr, power_spectrum};
use atomrx::LadderSystem;
use std::f64::consts::TAU;

fn main() {
    let deph = TAU * 200.0e3;
    let sys = LadderSystem {
        omega_p: TAU * 1.0e6,
        omega_c: TAU * 5.0e6,
        gamma: [TAU * 5.2e6, TAU * 1.0e3, TAU * 1.0e3],
        gamma_deph: [0.0, deph, deph, deph, deph, deph],
        ..LadderSystem::default()
    };
    let receiver = HeterodyneReceiver::new(sys, 2000.0 * EA0).expect("receiver");

    let e_loc = 0.239; // V/m, the optimized local field
    let slope = receiver.response_slope(e_loc).expect("slope");
    println!("local field {e_loc} V/m, response slope {slope:.4} per V/m");
    println!();

    let offset = 50.0e3;
    let tone = ToneSpec::beacon(offset, 2.0e-4, 0.0);
    let trace = receiver
        .synthesize_trace(e_loc, &tone, 500.0e3, 0.5, 1.0e-3, 7)
        .expect("trace");
    let spec = power_spectrum(&trace, 100.0).expect("spectrum");
    let snr = measure_snr(&spec, (offset - 1.0e3, offset + 1.0e3)).expect("snr");

    println!("beat tone at {} kHz:", offset / 1e3);
    println!("  peak power   {:>8.2} dB", snr.signal_power);
    println!(
        "  noise floor  {:>8.2} dB @ {} Hz RBW",
        snr.noise_floor, snr.rbw
    );
    println!("  SNR          {:>8.2} dB", snr.snr);
    println!();

    // The beat power is linear in E_sig^2: doubling the signal field adds
    // 6.02 dB at the beat bin.
    println!("E_sig (V/m)   beat power (dB)");
    for e_sig in [1.0e-4, 2.0e-4, 4.0e-4] {
        let tone = ToneSpec::beacon(offset, e_sig, 0.0);
        let trace = receiver
            .synthesize_trace(e_loc, &tone, 500.0e3, 0.5, 0.0, 0)
            .expect("trace");
        let spec = power_spectrum(&trace, 100.0).expect("spectrum");
        let peak = measure_snr(&spec, (offset - 1.0e3, offset + 1.0e3))
            .expect("snr")
            .signal_power;
        println!("{e_sig:>11.1e}   {peak:>10.2}");
    }
}
