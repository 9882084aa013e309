//! Work extraction from a single dissipative qubit.
//!
//! The crate is organised bottom-up:
//!
//! - [`state`]: 2×2 density matrices, Bloch vectors, spectra and entropy.
//! - [`ergotropy`]: energy, passive states, total/incoherent/coherent ergotropy
//!   and relative-entropy coherence.
//! - [`control`]: axis-angle gates driven by sampled pulse envelopes, their
//!   thermodynamic cost and step efficiencies.
//! - [`dynamics`]: a fixed-step RK4 Lindblad integrator for T1/T2 decoherence.
//! - [`measurement`]: Pauli readout, shot sampling, linear-inversion
//!   tomography and repetition statistics.
//! - [`protocols`]: dephasing, direct and sequential extraction runs.
//! - [`analysis`]: Rabi-angle sweeps, efficiency optima and the coherent
//!   ergotropy surface.
//! - [`export`]: stable CSV/JSON encodings of traces and sweeps.
//!
//! Energies are reported in units of ħω_q with the ground state at zero.
//! Logarithms are natural, so entropies and coherences are in nats.

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod control;
pub mod dynamics;
pub mod ergotropy;
mod error;
pub mod export;
mod linalg;
pub mod measurement;
pub mod numeric;
pub mod protocols;
pub mod state;

pub use ergotropy::{ErgotropyReport, QubitParams};
pub use error::{Error, Result};
pub use state::{BlochVector, DensityMatrix, Spectrum};

pub use num_complex::Complex64;
