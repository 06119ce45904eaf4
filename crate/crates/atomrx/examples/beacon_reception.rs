//! End-to-end beacon reception: the bundled geostationary scenario drives
//! the whole chain, from the power ledger through trace synthesis to the
//! measured SNR at 1 Hz resolution bandwidth.
//!
//! ```bash
//! cargo run --release --example beacon_reception
//! ```

use atomrx::heterodyne::HeterodyneReceiver;
use atomrx::psd::{measure_snr, power_spectrum};
use atomrx::scenario::parse_scenario;

fn main() {
    let path = format!(
        "{}/scenarios/beacon_geo.scenario",
        env!("CARGO_MANIFEST_DIR")
    );
    let text = std::fs::read_to_string(&path).expect("bundled scenario");
    let scenario = parse_scenario(&text).expect("parse");

    let budget = scenario.link_budget().expect("budget");
    println!("ledger for `{}`:", scenario.name);
    for (label, power) in budget.checkpoints() {
        println!("  after {label:<18} {power:>9.2} dBm");
    }
    println!(
        "  predicted SNR {:.2} dB against {:.0} dBm floor",
        budget.predicted_snr, budget.noise_floor
    );

    let e_sig = scenario.e_sig_for_rx_power(budget.rx_power);
    let noise_rms = scenario.noise_rms_from_floor();
    println!();
    println!("signal field at the cell: {e_sig:.3e} V/m");
    println!("field-equivalent noise rms: {noise_rms:.3e} V/m");

    let h = &scenario.heterodyne;
    let receiver = HeterodyneReceiver::new(scenario.ladder_system(), scenario.dipole_moment())
        .expect("receiver");
    let trace = receiver
        .synthesize_trace(
            h.e_loc_v_per_m,
            &scenario.tone_spec(e_sig),
            h.sample_rate_hz,
            h.duration_s,
            noise_rms,
            h.seed,
        )
        .expect("trace");
    let spec = power_spectrum(&trace, h.rbw_hz).expect("spectrum");
    let snr = measure_snr(&spec, scenario.signal_band()).expect("snr");

    println!();
    println!(
        "measured SNR {:.2} dB at {:.0} Hz RBW (beat at {:.0} kHz)",
        snr.snr,
        h.rbw_hz,
        h.offset_hz / 1e3
    );
    if let Some(reported) = scenario.budget.reported_snr_db {
        println!("externally reported SNR for comparison: {reported} dB");
    }
}
