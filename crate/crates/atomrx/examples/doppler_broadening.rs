//! Thermal-velocity averaging of the EIT line: counter-propagating probe and
//! coupling beams largely cancel the Doppler shifts (residual ~ |k_c - k_p|),
//! while co-propagating beams smear the transparency over k_c + k_p.
//!
//! ```bash
//! cargo run --release --example doppler_broadening
//! ```

use atomrx::eit::{eit_spectrum, BeamGeometry, DopplerAveraging};
use atomrx::spectrum::Spectrum;
use atomrx::LadderSystem;
use std::f64::consts::TAU;

fn fwhm(spec: &Spectrum) -> f64 {
    let (x, y) = (spec.x(), spec.y());
    let peak = spec.argmax();
    let half = y[peak] / 2.0;
    let mut left = x[0];
    for i in (1..=peak).rev() {
        if y[i - 1] <= half && y[i] > half {
            let t = (half - y[i - 1]) / (y[i] - y[i - 1]);
            left = x[i - 1] + t * (x[i] - x[i - 1]);
            break;
        }
    }
    let mut right = x[x.len() - 1];
    for i in peak..y.len() - 1 {
        if y[i] > half && y[i + 1] <= half {
            let t = (y[i] - half) / (y[i] - y[i + 1]);
            right = x[i] + t * (x[i + 1] - x[i]);
            break;
        }
    }
    right - left
}

fn main() {
    let sys = LadderSystem {
        omega_p: TAU * 0.4e6,
        omega_c: TAU * 2.0e6,
        gamma: [TAU * 2.0e6, TAU * 10.0e3, TAU * 10.0e3],
        ..LadderSystem::default()
    };
    let range = (-25.0e6, 25.0e6);
    let n_points = 201;

    let cold = eit_spectrum(&sys, range, n_points).expect("sweep");
    println!("intrinsic line: FWHM {:.3} MHz", fwhm(&cold) / 1e6);

    // 0.1 K keeps both geometries resolvable on a uniform velocity grid; the
    // geometry ordering itself is temperature independent.
    let temperature = 0.1;
    let base = DopplerAveraging::new(temperature, 852.357e-9, 509.236e-9, 1501);
    println!(
        "thermal velocity at {temperature} K: {:.2} m/s",
        base.thermal_velocity()
    );
    for (label, geometry) in [
        ("counter-propagating", BeamGeometry::CounterPropagating),
        ("co-propagating", BeamGeometry::CoPropagating),
    ] {
        let spec = base
            .with_geometry(geometry)
            .eit_spectrum(&sys, range, n_points)
            .expect("averaged sweep");
        println!("{label:>20}: FWHM {:.3} MHz", fwhm(&spec) / 1e6);
    }

    let (velocities, weights) = base.velocity_grid();
    println!(
        "velocity grid: {} samples over [{:.2}, {:.2}] m/s, weight sum {:.12}",
        velocities.len(),
        velocities[0],
        velocities[velocities.len() - 1],
        weights.iter().sum::<f64>()
    );
}
