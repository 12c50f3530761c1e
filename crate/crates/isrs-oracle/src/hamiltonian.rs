use isrs_model::{Chi0, FrequencyGrid, Interaction, Mat2, PhononMode, Polarization, C64};
use isrs_perturb::WeightVariant;

use crate::{FockBasis, FockConfig, OperatorMatrix, Result};

/// Phonon part of a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhononFactor {
    None,
    Create,
    Annihilate,
    /// `b†b`.
    Number,
}

/// `coef · a†_c a_d · (b†|b|1)`; `photon = None` is the photon identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticTerm {
    pub coef: C64,
    pub photon: Option<(usize, usize)>,
    pub phonon: PhononFactor,
}

impl QuadraticTerm {
    /// Action on a basis state: target index and matrix element.
    pub fn act(&self, basis: &FockBasis, index: usize) -> Option<(usize, C64)> {
        let mut i = index;
        let mut amp = 1.0;
        if let Some((c, d)) = self.photon {
            let (k, x) = basis.lower(i, d)?;
            let (k, y) = basis.raise(k, c)?;
            i = k;
            amp *= x * y;
        }
        match self.phonon {
            PhononFactor::None => {}
            PhononFactor::Create => {
                let (k, x) = basis.raise_phonon(i)?;
                i = k;
                amp *= x;
            }
            PhononFactor::Annihilate => {
                let (k, x) = basis.lower_phonon(i)?;
                i = k;
                amp *= x;
            }
            PhononFactor::Number => {
                let n = basis.phonon(i);
                if n == 0 {
                    return None;
                }
                amp *= n as f64;
            }
        }
        Some((i, self.coef * amp))
    }
}

/// Treatment of the phonon coordinate inside the refractive coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ref1Mode {
    Off,
    /// Genuine operator `b + b†`.
    Operator,
    /// `b + b†` replaced by the given mean value.
    MeanField(f64),
}

/// Which parts of the Hamiltonian are switched on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianTerms {
    pub ref0: bool,
    pub ref1: Ref1Mode,
    pub raman: bool,
}

impl HamiltonianTerms {
    pub fn raman_only() -> Self {
        Self { ref0: false, ref1: Ref1Mode::Off, raman: true }
    }

    pub fn full(ref1: Ref1Mode) -> Self {
        Self { ref0: true, ref1, raman: true }
    }
}

/// Grid, truncation and couplings of one oracle run.
///
/// `chi0` holds the effective equilibrium couplings (rad/ps); the Raman
/// tensor of `mode` is raw and enters as `χ̃_j = −κ ω₀ f_j χ⁽¹⁾`, with `f_j`
/// the weight of the lower bin.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSystem {
    pub basis: FockBasis,
    pub mode: PhononMode,
    pub int: Interaction,
    pub chi0: Chi0,
    pub variant: WeightVariant,
    pub block_cap: usize,
}

impl OracleSystem {
    pub fn new(
        grid: FrequencyGrid,
        config: &FockConfig,
        mode: PhononMode,
        int: Interaction,
        chi0: Chi0,
        variant: WeightVariant,
    ) -> Result<Self> {
        grid.offset(mode.omega)?;
        Ok(Self { basis: FockBasis::new(grid, config)?, mode, int, chi0, variant, block_cap: config.block_cap })
    }

    pub fn offset(&self) -> i64 {
        self.basis.grid().offset(self.mode.omega).expect("offset checked on construction") as i64
    }

    /// Effective Raman coupling matrix for lower bin `j`.
    pub fn effective_chi1(&self, j: i64) -> Mat2 {
        let g = self.basis.grid();
        let k = -self.mode.raman_scale(&self.int) * g.center() * self.variant.relative(g, j);
        let chi = self.mode.chi1();
        [[k * chi[0][0], k * chi[0][1]], [k * chi[1][0], k * chi[1][1]]]
    }

    pub(crate) fn same_bin(&self, j: i64, m: &Mat2, phonon: PhononFactor, scale: f64, out: &mut Vec<QuadraticTerm>) {
        for (l, pl) in Polarization::BOTH.into_iter().enumerate() {
            for (r, pr) in Polarization::BOTH.into_iter().enumerate() {
                let c = m[l][r] * scale;
                if c != 0.0 {
                    let photon = Some((self.basis.mode(pl, j).unwrap(), self.basis.mode(pr, j).unwrap()));
                    out.push(QuadraticTerm { coef: C64::new(c, 0.0), photon, phonon });
                }
            }
        }
    }

    pub fn hamiltonian_terms(&self, terms: &HamiltonianTerms) -> Vec<QuadraticTerm> {
        let grid = *self.basis.grid();
        let n = self.offset();
        let mut out = Vec::new();
        if terms.ref0 {
            let m = self.chi0.effective();
            for j in grid.j_values() {
                self.same_bin(j, &m, PhononFactor::None, 1.0, &mut out);
            }
        }
        match terms.ref1 {
            Ref1Mode::Off => {}
            Ref1Mode::Operator => {
                for j in grid.j_values() {
                    let m = self.effective_chi1(j);
                    self.same_bin(j, &m, PhononFactor::Create, 2.0, &mut out);
                    self.same_bin(j, &m, PhononFactor::Annihilate, 2.0, &mut out);
                }
            }
            Ref1Mode::MeanField(q) => {
                for j in grid.j_values() {
                    let m = self.effective_chi1(j);
                    self.same_bin(j, &m, PhononFactor::None, 2.0 * q, &mut out);
                }
            }
        }
        if terms.raman {
            for j in grid.j_values().filter(|&j| grid.index_of(j + n).is_some()) {
                let m = self.effective_chi1(j);
                for (l, pl) in Polarization::BOTH.into_iter().enumerate() {
                    for (r, pr) in Polarization::BOTH.into_iter().enumerate() {
                        if m[l][r] == 0.0 {
                            continue;
                        }
                        let lo = self.basis.mode(pl, j).unwrap();
                        let hi = self.basis.mode(pr, j + n).unwrap();
                        let coef = C64::new(m[l][r], 0.0);
                        out.push(QuadraticTerm { coef, photon: Some((lo, hi)), phonon: PhononFactor::Create });
                        out.push(QuadraticTerm { coef, photon: Some((hi, lo)), phonon: PhononFactor::Annihilate });
                    }
                }
            }
        }
        out
    }

    /// Dense-block matrix of a sum of terms.
    pub fn assemble(&self, terms: &[QuadraticTerm]) -> Result<OperatorMatrix> {
        let dim = self.basis.dim();
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for c in 0..dim {
            for t in terms {
                if let Some((r, v)) = t.act(&self.basis, c) {
                    rows[r].push((c, v));
                }
            }
        }
        OperatorMatrix::from_rows(dim, rows, self.block_cap)
    }

    /// `Σ terms · v` without assembling a matrix.
    pub fn apply_terms(&self, terms: &[QuadraticTerm], v: &[C64]) -> Result<Vec<C64>> {
        let dim = self.basis.dim();
        if v.len() != dim {
            return Err(crate::OracleError::BasisMismatch { expected: dim, got: v.len() });
        }
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for (c, &x) in v.iter().enumerate() {
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for t in terms {
                if let Some((r, a)) = t.act(&self.basis, c) {
                    out[r] += a * x;
                }
            }
        }
        Ok(out)
    }
}

/// `H_Ref⁽⁰⁾ + H_Ref⁽¹⁾ + H_Ram` with the selected parts.
pub fn build_total_hamiltonian(system: &OracleSystem, terms: &HamiltonianTerms) -> Result<OperatorMatrix> {
    system.assemble(&system.hamiltonian_terms(terms))
}

/// Compensating analyzer Hamiltonian `Σ_j χ^Rot a†a`.
pub fn analyzer_hamiltonian(system: &OracleSystem) -> Result<OperatorMatrix> {
    let m = system.chi0.rot();
    let mut out = Vec::new();
    for j in system.basis.grid().j_values() {
        system.same_bin(j, &m, PhononFactor::None, 1.0, &mut out);
    }
    system.assemble(&out)
}
