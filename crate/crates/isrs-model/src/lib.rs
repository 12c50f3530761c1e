//! Shared physical types: frequency grids, multimode coherent pulses,
//! susceptibility tensors and phonon modes.
//!
//! Units: ħ = 1, frequencies are angular (rad/ps), times are in ps. User
//! facing values in THz go through [`thz_to_angular`].

mod error;
mod grid;
mod phonon;
mod pulse;
mod susceptibility;

pub use error::ModelError;
pub use grid::FrequencyGrid;
pub use phonon::{Interaction, PhononMode, PhononPhaseState};
pub use pulse::{Polarization, PulseState};
pub use susceptibility::{chi0_matrix, chi1_matrix, Chi0, Chi1Mode, Mat2, SusceptibilityModel, SymmetryClass};

pub use num_complex::Complex64 as C64;

/// Converts an ordinary frequency in THz to an angular frequency in rad/ps.
pub fn thz_to_angular(f_thz: f64) -> f64 {
    std::f64::consts::TAU * f_thz
}

/// Converts an angular frequency in rad/ps to THz.
pub fn angular_to_thz(omega: f64) -> f64 {
    omega / std::f64::consts::TAU
}

pub type Result<T> = std::result::Result<T, ModelError>;
