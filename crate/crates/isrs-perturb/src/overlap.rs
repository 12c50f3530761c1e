use isrs_model::{Mat2, Polarization, PulseState, Result};

use crate::WeightVariant;

/// Overlap sums of a pulse with itself shifted by one phonon quantum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapSum {
    /// `γ = Σ χ⁽¹⁾_{λλ′} w_j |α_{λj}||α_{λ′,j+n}|`, with `w_j` set by the variant.
    pub gamma: f64,
    /// `η = Σ_j |α_j||α_{j+n}|` of the polarization-summed moduli.
    pub eta: f64,
    pub variant: WeightVariant,
}

pub fn overlap_sums(pulse: &PulseState, chi1: &Mat2, omega: f64, variant: WeightVariant) -> Result<OverlapSum> {
    let grid = pulse.grid();
    let n = grid.offset(omega)? as i64;
    let mut gamma = 0.0;
    for j in grid.j_values() {
        let w = variant.weight(grid, j);
        for (l, pl) in Polarization::BOTH.into_iter().enumerate() {
            let a = pulse.modulus(pl, j);
            for (m, pm) in Polarization::BOTH.into_iter().enumerate() {
                gamma += chi1[l][m] * w * a * pulse.modulus(pm, j + n);
            }
        }
    }
    let eta = pair_overlap(pulse, n, WeightVariant::Sm);
    Ok(OverlapSum { gamma, eta, variant })
}

/// `Σ_j (w_j/ω₀) |α_j||α_{j+n}|` over polarization-summed moduli.
pub fn pair_overlap(pulse: &PulseState, n: i64, variant: WeightVariant) -> f64 {
    let grid = pulse.grid();
    grid.j_values()
        .map(|j| variant.relative(grid, j) * pulse.total_modulus(j) * pulse.total_modulus(j + n))
        .sum()
}
