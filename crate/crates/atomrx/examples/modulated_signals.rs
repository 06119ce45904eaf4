//! Square-modulated carriers through the LNA-assisted chain: predicted
//! odd-harmonic sidebands, the measured spectrum around the 400 kHz beat,
//! and SNR for the narrow and wide bandwidth configurations.
//!
//! ```bash
//! cargo run --release --example modulated_signals
//! ```

use atomrx::heterodyne::{square_mod_sidebands, HeterodyneReceiver, DEFAULT_HARMONIC_CAP};
use atomrx::psd::{measure_snr, power_spectrum};
use atomrx::scenario::parse_scenario;

fn main() {
    for name in ["modulated_narrow.scenario", "modulated_wide.scenario"] {
        let path = format!("{}/scenarios/{name}", env!("CARGO_MANIFEST_DIR"));
        let scenario =
            parse_scenario(&std::fs::read_to_string(&path).expect("read")).expect("parse");
        let budget = scenario.link_budget().expect("budget");
        let e_sig = scenario.e_sig_for_rx_power(budget.rx_power);
        let tone = scenario.tone_spec(e_sig);
        let h = &scenario.heterodyne;

        println!(
            "{}: {:.0} kHz bandwidth, keying at {:.1} kHz, rx {:.1} dBm",
            scenario.name,
            h.bandwidth_hz / 1e3,
            h.mod_rate_hz / 1e3,
            budget.rx_power
        );

        let receiver = HeterodyneReceiver::new(scenario.ladder_system(), scenario.dipole_moment())
            .expect("receiver");
        let noisy = receiver
            .synthesize_trace(
                h.e_loc_v_per_m,
                &tone,
                h.sample_rate_hz,
                h.duration_s,
                scenario.noise_rms_from_floor(),
                h.seed,
            )
            .expect("trace");
        let spec = power_spectrum(&noisy, h.rbw_hz).expect("spectrum");
        let snr = measure_snr(&spec, scenario.signal_band()).expect("snr");
        print!("  measured SNR {:.2} dB at {:.0} Hz RBW", snr.snr, h.rbw_hz);
        match scenario.budget.reported_snr_db {
            Some(reported) => println!(" (reported: ~{reported} dB)"),
            None => println!(),
        }

        let sidebands = square_mod_sidebands(&tone, DEFAULT_HARMONIC_CAP).expect("sidebands");
        println!("  predicted sidebands (relative to the first harmonic):");
        for (freq, rel_db) in sidebands {
            println!("    {:>8.1} kHz  {rel_db:>7.2} dB", freq / 1e3);
        }
        println!();
    }
}
