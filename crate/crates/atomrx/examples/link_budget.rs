//! Compose the satellite-to-receiver power ledger for a C-band beacon from
//! geostationary orbit and print every checkpoint.
//!
//! ```bash
//! cargo run --release --example link_budget
//! ```

use atomrx::link::{antenna_gain, compose_budget, path_loss, AntennaSpec};

fn main() {
    let freq_mhz = 3800.0;
    let distance_km = 36000.0;
    let loss = path_loss(freq_mhz, distance_km).expect("path loss");

    let antenna = AntennaSpec {
        diameter: 16.0,
        aperture_efficiency: 0.7,
        fixed_losses: Vec::new(),
    };
    let wavelength = 0.0788;
    let gain = antenna_gain(&antenna, wavelength).expect("gain");

    let budget = compose_budget(
        47.0,
        vec![
            ("free-space path loss".to_string(), loss),
            ("parabolic antenna gain".to_string(), gain),
            ("cable loss".to_string(), -3.0),
            ("polarization conversion".to_string(), -3.0),
        ],
        -128.0,
    );

    println!("beacon link budget, {freq_mhz} MHz over {distance_km} km");
    println!(
        "  {:>34}  {:>9.2} dBm",
        "transmit power (assumed)", budget.tx_power
    );
    for (label, power) in budget.checkpoints() {
        println!("  {label:>34}  {power:>9.2} dBm");
    }
    println!();
    println!("  received power    {:>9.2} dBm", budget.rx_power);
    println!(
        "  noise floor       {:>9.2} dBm @ 1 Hz RBW",
        budget.noise_floor
    );
    println!("  predicted SNR     {:>9.2} dB", budget.predicted_snr);
}
