use isrs_model::{Interaction, Mat2, PhononMode, Polarization, PulseState, Result, C64};

use crate::{overlap_sums, WeightVariant};

/// Per-bin values for both polarizations, each in ascending `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizedBins {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PolarizedBins {
    pub fn zeros(len: usize) -> Self {
        Self { x: vec![0.0; len], y: vec![0.0; len] }
    }

    pub fn get(&self, pol: Polarization) -> &[f64] {
        match pol {
            Polarization::X => &self.x,
            Polarization::Y => &self.y,
        }
    }

    fn get_mut(&mut self, pol: Polarization) -> &mut Vec<f64> {
        match pol {
            Polarization::X => &mut self.x,
            Polarization::Y => &mut self.y,
        }
    }

    /// Bin-wise polarization sum.
    pub fn total(&self) -> Vec<f64> {
        self.x.iter().zip(&self.y).map(|(a, b)| a + b).collect()
    }
}

/// Phonon moments `⟨b⟩`, `⟨b²⟩`, `⟨b†b⟩`, `⟨bb†⟩` of the state met by a pulse.
///
/// `⟨bb†⟩` is kept separately so truncated-space moments can be supplied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononMoments {
    pub b: C64,
    pub b2: C64,
    pub bdb: f64,
    pub bbd: f64,
}

impl PhononMoments {
    pub fn vacuum() -> Self {
        Self::thermal(0.0)
    }

    pub fn thermal(n_bar: f64) -> Self {
        Self { b: C64::new(0.0, 0.0), b2: C64::new(0.0, 0.0), bdb: n_bar, bbd: n_bar + 1.0 }
    }

    pub fn coherent(beta: C64) -> Self {
        Self { b: beta, b2: beta * beta, bdb: beta.norm_sqr(), bbd: beta.norm_sqr() + 1.0 }
    }

    /// `⟨p⟩ = √(mΩ/2V_S) · 2 Im⟨b⟩`.
    pub fn momentum(&self, mode: &PhononMode, int: &Interaction) -> f64 {
        (mode.mass * mode.omega / (2.0 * int.v_s)).sqrt() * 2.0 * self.b.im
    }

    /// `⟨q⟩ = 2 Re⟨b⟩ / √(2mΩV_S)`.
    pub fn position(&self, mode: &PhononMode, int: &Interaction) -> f64 {
        2.0 * self.b.re / (2.0 * mode.mass * mode.omega * int.v_s).sqrt()
    }
}

/// `Σ_{λ′} χ_{λλ′} w_j |α_{λj}| (|α_{λ′,j+n}| − |α_{λ′,j−n}|)`, the spectral
/// shape of every first-order Raman shift.
pub fn shift_profile(pulse: &PulseState, chi1: &Mat2, n: i64, variant: WeightVariant) -> PolarizedBins {
    let grid = pulse.grid();
    let mut out = PolarizedBins::zeros(grid.len());
    for (l, pl) in Polarization::BOTH.into_iter().enumerate() {
        let bins = out.get_mut(pl);
        for (i, j) in grid.j_values().enumerate() {
            let mut s = 0.0;
            for (m, pm) in Polarization::BOTH.into_iter().enumerate() {
                s += chi1[l][m] * (pulse.modulus(pm, j + n) - pulse.modulus(pm, j - n));
            }
            bins[i] = variant.weight(grid, j) * pulse.modulus(pl, j) * s;
        }
    }
    out
}

fn isrs_prefactor(mode: &PhononMode, int: &Interaction) -> f64 {
    int.tau * int.v_s / (2.0 * int.v * mode.mass * mode.omega)
}

/// First-order momentum-driven change `(τV_S/2VmΩ) · profile · ⟨p(0)⟩`.
pub fn first_order_intensity(
    probe: &PulseState,
    mode: &PhononMode,
    int: &Interaction,
    variant: WeightVariant,
    p0: f64,
) -> Result<PolarizedBins> {
    let n = probe.grid().offset(mode.omega)? as i64;
    let mut d = shift_profile(probe, &mode.chi1(), n, variant);
    let k = isrs_prefactor(mode, int) * p0;
    d.x.iter_mut().chain(d.y.iter_mut()).for_each(|v| *v *= k);
    Ok(d)
}

/// Transmitted pump spectrum after meeting an equilibrium phonon:
/// `|α|² + (τ²V_S/8V²mΩ) γ · profile`, second-order phonon terms dropped.
pub fn pump_transmission(
    pump: &PulseState,
    mode: &PhononMode,
    int: &Interaction,
    variant: WeightVariant,
) -> Result<PolarizedBins> {
    let chi = mode.chi1();
    let gamma = overlap_sums(pump, &chi, mode.omega, variant)?.gamma;
    let n = pump.grid().offset(mode.omega)? as i64;
    let mut out = shift_profile(pump, &chi, n, variant);
    let k = int.tau * int.tau * int.v_s / (8.0 * int.v * int.v * mode.mass * mode.omega) * gamma;
    for pol in Polarization::BOTH {
        let bins = out.get_mut(pol);
        for (i, j) in pump.grid().j_values().enumerate() {
            bins[i] = pump.intensity(pol, j) + k * bins[i];
        }
    }
    Ok(out)
}

/// Second-order phonon-moment coefficient `γ′_j` of the transmitted intensity.
///
/// Amplitudes beyond the grid are zero. Each of the two diagonal `χ̃²` terms
/// only appears when the intermediate bin `j ± n` lies on the grid.
pub fn gamma_prime(
    probe: &PulseState,
    mode: &PhononMode,
    int: &Interaction,
    variant: WeightVariant,
    moments: &PhononMoments,
) -> Result<PolarizedBins> {
    let grid = probe.grid();
    let n = grid.offset(mode.omega)? as i64;
    let chi = mode.chi1();
    let kappa = mode.raman_scale(int);
    let rb2 = moments.b2.re;
    let a = |m: usize, j: i64| probe.modulus(Polarization::BOTH[m], j);
    let mut out = PolarizedBins::zeros(grid.len());
    for (i, j) in grid.j_values().enumerate() {
        let c = -kappa * variant.weight(grid, j);
        let ct = [[c * chi[0][0], c * chi[0][1]], [c * chi[1][0], c * chi[1][1]]];
        let mut ct2 = [[0.0; 2]; 2];
        for r in 0..2 {
            for k in 0..2 {
                ct2[r][k] = ct[r][0] * ct[0][k] + ct[r][1] * ct[1][k];
            }
        }
        let up = if grid.index_of(j + n).is_some() { 1.0 } else { 0.0 };
        let dn = if grid.index_of(j - n).is_some() { 1.0 } else { 0.0 };
        for (mu, pol) in Polarization::BOTH.into_iter().enumerate() {
            let (mut x, mut y, mut far, mut same) = (0.0, 0.0, 0.0, 0.0);
            for l in 0..2 {
                x += ct[mu][l] * a(l, j + n);
                y += ct[l][mu] * a(l, j - n);
                far += ct2[mu][l] * (a(l, j + 2 * n) + a(l, j - 2 * n));
                same += ct2[mu][l] * a(l, j);
            }
            let first = x * x * moments.bbd + 2.0 * x * y * rb2 + y * y * moments.bdb;
            let second = a(mu, j) * (rb2 * far + same * (up * moments.bdb + dn * moments.bbd));
            out.get_mut(pol)[i] = first - second;
        }
    }
    Ok(out)
}

/// Transmitted intensity to second order in `τ`:
/// `|α|² + (τV_S/2VmΩ) · profile · (⟨p(0)⟩ + τγ/4V) + τ² γ′`.
pub fn intensity_eq13(
    probe: &PulseState,
    mode: &PhononMode,
    int: &Interaction,
    variant: WeightVariant,
    moments: &PhononMoments,
) -> Result<PolarizedBins> {
    let chi = mode.chi1();
    let gamma = overlap_sums(probe, &chi, mode.omega, variant)?.gamma;
    let p0 = moments.momentum(mode, int);
    let mut out = first_order_intensity(probe, mode, int, variant, p0 + int.tau * gamma / (4.0 * int.v))?;
    let gp = gamma_prime(probe, mode, int, variant, moments)?;
    let t2 = int.tau * int.tau;
    for pol in Polarization::BOTH {
        let g = gp.get(pol);
        let bins = out.get_mut(pol);
        for (i, j) in probe.grid().j_values().enumerate() {
            bins[i] += probe.intensity(pol, j) + t2 * g[i];
        }
    }
    Ok(out)
}
