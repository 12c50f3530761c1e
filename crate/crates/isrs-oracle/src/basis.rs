use isrs_model::{FrequencyGrid, Polarization};

use crate::{OracleError, Result};

/// Truncation and size limits of the Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockConfig {
    /// Maximum occupation of every photon mode.
    pub photon_cutoff: usize,
    /// Maximum phonon occupation.
    pub phonon_cutoff: usize,
    /// Upper bound on the total dimension.
    pub dim_cap: usize,
    /// Upper bound on a single dense block.
    pub block_cap: usize,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self { photon_cutoff: 2, phonon_cutoff: 4, dim_cap: 200_000, block_cap: 20_000 }
    }
}

/// Occupation-number basis: photon modes `p = λ·(2J+1) + (j+J)` are the
/// leading digits, the phonon number the last (fastest) one.
#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    grid: FrequencyGrid,
    photon_cutoff: usize,
    phonon_cutoff: usize,
    strides: Vec<usize>,
    dim: usize,
}

impl FockBasis {
    pub fn new(grid: FrequencyGrid, config: &FockConfig) -> Result<Self> {
        let modes = 2 * grid.len();
        let base = config.photon_cutoff as u128 + 1;
        let mut dim = config.phonon_cutoff as u128 + 1;
        for _ in 0..modes {
            dim = dim.saturating_mul(base);
        }
        if dim > config.dim_cap as u128 {
            return Err(OracleError::DimensionCap { dim: usize::try_from(dim).unwrap_or(usize::MAX), cap: config.dim_cap });
        }
        let mut strides = vec![0; modes];
        let mut s = config.phonon_cutoff + 1;
        for p in (0..modes).rev() {
            strides[p] = s;
            s *= config.photon_cutoff + 1;
        }
        Ok(Self {
            grid,
            photon_cutoff: config.photon_cutoff,
            phonon_cutoff: config.phonon_cutoff,
            strides,
            dim: dim as usize,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn photon_modes(&self) -> usize {
        self.strides.len()
    }

    pub fn photon_cutoff(&self) -> usize {
        self.photon_cutoff
    }

    pub fn phonon_cutoff(&self) -> usize {
        self.phonon_cutoff
    }

    /// Photon mode index of `(λ, j)`, `None` off the grid.
    pub fn mode(&self, pol: Polarization, j: i64) -> Option<usize> {
        self.grid.index_of(j).map(|i| pol.index() * self.grid.len() + i)
    }

    pub fn photon(&self, index: usize, mode: usize) -> usize {
        index / self.strides[mode] % (self.photon_cutoff + 1)
    }

    pub fn phonon(&self, index: usize) -> usize {
        index % (self.phonon_cutoff + 1)
    }

    pub fn total_photons(&self, index: usize) -> usize {
        (0..self.photon_modes()).map(|p| self.photon(index, p)).sum()
    }

    /// `a_p` on a basis state: new index and `√n`.
    pub fn lower(&self, index: usize, mode: usize) -> Option<(usize, f64)> {
        let n = self.photon(index, mode);
        (n > 0).then(|| (index - self.strides[mode], (n as f64).sqrt()))
    }

    /// `a†_p` within the truncation.
    pub fn raise(&self, index: usize, mode: usize) -> Option<(usize, f64)> {
        let n = self.photon(index, mode);
        (n < self.photon_cutoff).then(|| (index + self.strides[mode], ((n + 1) as f64).sqrt()))
    }

    pub fn lower_phonon(&self, index: usize) -> Option<(usize, f64)> {
        let n = self.phonon(index);
        (n > 0).then(|| (index - 1, (n as f64).sqrt()))
    }

    pub fn raise_phonon(&self, index: usize) -> Option<(usize, f64)> {
        let n = self.phonon(index);
        (n < self.phonon_cutoff).then(|| (index + 1, ((n + 1) as f64).sqrt()))
    }

    /// Index of an occupation pattern (`photons` in mode order).
    pub fn encode(&self, photons: &[usize], phonon: usize) -> usize {
        debug_assert_eq!(photons.len(), self.photon_modes());
        photons.iter().zip(&self.strides).map(|(n, s)| n * s).sum::<usize>() + phonon
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn basis(c: usize, p: usize) -> FockBasis {
        let g = FrequencyGrid::new(10.0, 1.0, 1).unwrap();
        FockBasis::new(g, &FockConfig { photon_cutoff: c, phonon_cutoff: p, ..Default::default() }).unwrap()
    }

    #[test]
    fn dimension_and_cap() {
        assert_eq!(basis(2, 4).dim(), 3usize.pow(6) * 5);
        let g = FrequencyGrid::new(10.0, 1.0, 3).unwrap();
        let err = FockBasis::new(g, &FockConfig { photon_cutoff: 3, phonon_cutoff: 4, ..Default::default() });
        assert!(matches!(err, Err(OracleError::DimensionCap { .. })));
    }

    #[test]
    fn phonon_is_fastest_digit() {
        let b = basis(2, 4);
        assert_eq!(b.encode(&[0, 0, 0, 0, 0, 1], 0), 5);
        assert_eq!(b.encode(&[1, 0, 0, 0, 0, 0], 0), 3usize.pow(5) * 5);
        assert_eq!(b.mode(Polarization::Y, 1), Some(5));
        assert_eq!(b.mode(Polarization::X, 2), None);
    }

    proptest! {
        #[test]
        fn encode_decode(occ in proptest::collection::vec(0usize..3, 6), nb in 0usize..5) {
            let b = basis(2, 4);
            let i = b.encode(&occ, nb);
            prop_assert!(i < b.dim());
            for (p, &n) in occ.iter().enumerate() {
                prop_assert_eq!(b.photon(i, p), n);
            }
            prop_assert_eq!(b.phonon(i), nb);
            prop_assert_eq!(b.total_photons(i), occ.iter().sum::<usize>());
        }

        #[test]
        fn ladder_round_trip(occ in proptest::collection::vec(0usize..3, 6), nb in 0usize..5, p in 0usize..6) {
            let b = basis(2, 4);
            let i = b.encode(&occ, nb);
            if let Some((k, a)) = b.raise(i, p) {
                let (back, c) = b.lower(k, p).unwrap();
                prop_assert_eq!(back, i);
                prop_assert_eq!(a, c);
            } else {
                prop_assert_eq!(occ[p], 2);
            }
            if let Some((k, _)) = b.raise_phonon(i) {
                prop_assert_eq!(b.phonon(k), nb + 1);
            }
        }
    }
}
