use crate::{ModelError, Result};

/// Uniform comb of optical modes `ω_j = ω₀ + j·δ` for `j ∈ [−J, J]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    center: f64,
    spacing: f64,
    half_width: usize,
}

/// Relative tolerance used when checking that `Ω/δ` is an integer.
const OFFSET_TOL: f64 = 1e-9;

impl FrequencyGrid {
    pub fn new(center: f64, spacing: f64, half_width: usize) -> Result<Self> {
        if !center.is_finite() {
            return Err(ModelError::param("center", center, "must be finite"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(ModelError::param("spacing", spacing, "must be positive and finite"));
        }
        if half_width < 1 {
            return Err(ModelError::param("half_width", half_width as f64, "must be at least 1"));
        }
        Ok(Self { center, spacing, half_width })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Number of bins, `2J + 1`.
    pub fn len(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn j_min(&self) -> i64 {
        -(self.half_width as i64)
    }

    pub fn j_max(&self) -> i64 {
        self.half_width as i64
    }

    pub fn j_values(&self) -> impl Iterator<Item = i64> {
        self.j_min()..=self.j_max()
    }

    pub fn omega(&self, j: i64) -> f64 {
        self.center + j as f64 * self.spacing
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.j_values().map(|j| self.omega(j)).collect()
    }

    /// Storage index of bin `j`, or `None` when `j` is off the grid.
    pub fn index_of(&self, j: i64) -> Option<usize> {
        let k = j + self.half_width as i64;
        (0..self.len() as i64).contains(&k).then_some(k as usize)
    }

    pub fn j_of(&self, index: usize) -> i64 {
        index as i64 - self.half_width as i64
    }

    /// Bin offset `n = Ω/δ` of a phonon frequency; rejects non-integer ratios.
    pub fn offset(&self, omega: f64) -> Result<usize> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(ModelError::param("omega", omega, "phonon frequency must be positive"));
        }
        let ratio = omega / self.spacing;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > OFFSET_TOL * ratio.max(1.0) {
            return Err(ModelError::OffGrid { omega, spacing: self.spacing, ratio });
        }
        Ok(n as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        let g = FrequencyGrid::new(10.0, 0.5, 3).unwrap();
        assert_eq!(g.len(), 7);
        for (i, j) in g.j_values().enumerate() {
            assert_eq!(g.index_of(j), Some(i));
            assert_eq!(g.j_of(i), j);
        }
        assert_eq!(g.index_of(4), None);
        assert_eq!(g.index_of(-4), None);
        assert_eq!(g.omega(-3), 8.5);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FrequencyGrid::new(1.0, 0.0, 1).is_err());
        assert!(FrequencyGrid::new(1.0, -1.0, 1).is_err());
        assert!(FrequencyGrid::new(1.0, 1.0, 0).is_err());
        assert!(FrequencyGrid::new(f64::NAN, 1.0, 1).is_err());
    }

    #[test]
    fn offset_requires_integer_ratio() {
        let d = crate::thz_to_angular(0.15);
        let g = FrequencyGrid::new(crate::thz_to_angular(380.0), d, 200).unwrap();
        assert_eq!(g.offset(crate::thz_to_angular(4.05)).unwrap(), 27);
        assert_eq!(g.offset(crate::thz_to_angular(6.0)).unwrap(), 40);
        assert_eq!(g.offset(crate::thz_to_angular(13.95)).unwrap(), 93);
        assert!(matches!(g.offset(crate::thz_to_angular(4.0)), Err(ModelError::OffGrid { .. })));
        assert!(g.offset(0.0).is_err());
    }
}
