//! Simulation and analysis toolkit for a Rydberg-atom satellite receiver chain.
//!
//! The crate models the full signal path of an atomic microwave receiver:
//!
//! * [`atomic`] — four-level ladder system (ground, excited, Rydberg, Rydberg'),
//!   Lindblad master equation, steady-state and time-domain solvers.
//! * [`eit`] — electromagnetically-induced-transparency spectra swept over
//!   coupling-laser detuning, with optional Doppler averaging over a thermal
//!   velocity distribution.
//! * [`inference`] — Autler-Townes splitting extraction and inversion to field
//!   strength, `E = k*sqrt(P)` calibration fits, and sensitivity reports.
//! * [`heterodyne`] — superheterodyne readout: a strong local microwave plus a
//!   weak signal produce a low-frequency beat in the probe transmission, which
//!   is synthesized into baseband traces.
//! * [`psd`] — Welch power spectra at a chosen resolution bandwidth and SNR
//!   measurement.
//! * [`link`] — satellite-to-receiver power ledger: free-space path loss,
//!   parabolic antenna gain, cavity enhancement, end-to-end predicted SNR.
//! * [`scenario`] / [`cli`] — flat key-value scenario files and the command
//!   runner behind the `atomrx` binary.
//!
//! Start with the runnable examples (`cargo run --release --example
//! beacon_reception`) or the `atomrx` binary with one of the bundled
//! `scenarios/*.scenario` files.

// `!(x > 0.0)` is used throughout argument checks so NaN is rejected along
// with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic;
pub mod cli;
pub mod eit;
pub mod heterodyne;
pub mod inference;
mod linalg;
pub mod link;
pub mod psd;
pub mod scenario;
pub mod spectrum;

pub use atomic::{DensityMatrix, LadderSystem, SolverError};
pub use spectrum::{AxisKind, Spectrum};
