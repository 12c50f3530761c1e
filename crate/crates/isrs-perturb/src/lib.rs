//! Closed-form perturbative results of the ISRS/LRM model.
//!
//! Raw Raman tensors `χ⁽¹⁾` enter together with the interaction time, the
//! volumes and the phonon mass; the effective couplings
//! `χ̃ = −ω₀ √V_S/(2V√(2mΩ)) χ` are formed where needed. All sums run in
//! ascending bin order.

mod intensity;
mod kick;
mod overlap;
mod quartz;
mod rotation;

pub use intensity::{
    first_order_intensity, gamma_prime, intensity_eq13, pump_transmission, shift_profile, PhononMoments,
    PolarizedBins,
};
pub use kick::{free_evolve, momentum_radius, phonon_kick, phonon_number, GdagG};
pub use overlap::{overlap_sums, pair_overlap, OverlapSum};
pub use quartz::{
    generic_probe_modulation, mode_radius, probe_response_x, probe_response_x_terms, probe_response_y,
    pumped_modes, Channel, ProbeGeometry, ProbeModulation, PumpedMode, XTerms,
};
pub use rotation::{analyzer_coefficients, rotation_matrix, AnalyzerCoefficients, CMat2};

use isrs_model::FrequencyGrid;

/// Frequency weight inside the Raman sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WeightVariant {
    /// `ω_j` of the bin itself.
    MainText,
    /// The `ω_j ≈ ω₀` approximation; makes the spectral-shift sums telescope exactly.
    #[default]
    Sm,
}

impl WeightVariant {
    pub fn name(self) -> &'static str {
        match self {
            WeightVariant::MainText => "main-text",
            WeightVariant::Sm => "sm",
        }
    }

    /// Weight `ω_j` or `ω₀` for bin `j`.
    pub fn weight(self, grid: &FrequencyGrid, j: i64) -> f64 {
        match self {
            WeightVariant::MainText => grid.omega(j),
            WeightVariant::Sm => grid.center(),
        }
    }

    /// Weight relative to `ω₀`: `ω_j/ω₀` or exactly 1.
    pub fn relative(self, grid: &FrequencyGrid, j: i64) -> f64 {
        match self {
            WeightVariant::MainText => grid.omega(j) / grid.center(),
            WeightVariant::Sm => 1.0,
        }
    }
}

impl std::str::FromStr for WeightVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "main-text" => Ok(WeightVariant::MainText),
            "sm" => Ok(WeightVariant::Sm),
            other => Err(format!("unknown weight variant `{other}` (expected main-text or sm)")),
        }
    }
}
