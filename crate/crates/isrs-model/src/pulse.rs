use crate::{FrequencyGrid, ModelError, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    X,
    Y,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::X, Polarization::Y];

    pub fn index(self) -> usize {
        match self {
            Polarization::X => 0,
            Polarization::Y => 1,
        }
    }
}

/// Multimode coherent amplitudes `α_{λj}` on a frequency grid.
///
/// Storage is one flat vector of length `2·(2J+1)`: the x block followed by
/// the y block, each in ascending `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseState {
    grid: FrequencyGrid,
    amps: Vec<C64>,
    theta: Option<f64>,
}

impl PulseState {
    /// Mode-locked Gaussian pulse, `α_j = α₀ exp(−(jδ)²/(2σ²))`, linearly
    /// polarized at angle `θ` from the x axis.
    pub fn gaussian(grid: FrequencyGrid, alpha0: f64, sigma: f64, theta: f64) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return Err(ModelError::param("alpha0", alpha0, "must be positive"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ModelError::param("sigma", sigma, "must be positive"));
        }
        if !theta.is_finite() {
            return Err(ModelError::param("theta", theta, "must be finite"));
        }
        let (s, c) = theta.sin_cos();
        let n = grid.len();
        let mut amps = vec![C64::new(0.0, 0.0); 2 * n];
        for (i, j) in grid.j_values().enumerate() {
            let x = j as f64 * grid.spacing() / sigma;
            let a = alpha0 * (-0.5 * x * x).exp();
            amps[i] = C64::new(a * c, 0.0);
            amps[n + i] = C64::new(a * s, 0.0);
        }
        Ok(Self { grid, amps, theta: Some(theta) })
    }

    /// Raw amplitude tables, one per polarization, each of length `2J+1`.
    pub fn from_amplitudes(grid: FrequencyGrid, x: &[C64], y: &[C64]) -> Result<Self> {
        let n = grid.len();
        for v in [x, y] {
            if v.len() != n {
                return Err(ModelError::Dimension { expected: n, got: v.len() });
            }
        }
        if x.iter().chain(y).any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(ModelError::Unsupported("non-finite amplitude"));
        }
        let amps = x.iter().chain(y).copied().collect();
        Ok(Self { grid, amps, theta: None })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    /// The flat `[x…, y…]` amplitude vector.
    pub fn as_slice(&self) -> &[C64] {
        &self.amps
    }

    pub fn polarization(&self, pol: Polarization) -> &[C64] {
        let n = self.grid.len();
        &self.amps[pol.index() * n..(pol.index() + 1) * n]
    }

    /// Amplitude at bin `j`; zero when `j` is off the grid.
    pub fn amp(&self, pol: Polarization, j: i64) -> C64 {
        match self.grid.index_of(j) {
            Some(i) => self.amps[pol.index() * self.grid.len() + i],
            None => C64::new(0.0, 0.0),
        }
    }

    /// `|α_{λj}|`, zero off the grid.
    pub fn modulus(&self, pol: Polarization, j: i64) -> f64 {
        self.amp(pol, j).norm()
    }

    /// Polarization-summed modulus `(|α_{xj}|² + |α_{yj}|²)^{1/2}`.
    pub fn total_modulus(&self, j: i64) -> f64 {
        self.modulus(Polarization::X, j).hypot(self.modulus(Polarization::Y, j))
    }

    pub fn intensity(&self, pol: Polarization, j: i64) -> f64 {
        self.amp(pol, j).norm_sqr()
    }

    /// Same pulse with every amplitude multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self { grid: self.grid, amps: self.amps.iter().map(|a| a * k).collect(), theta: self.theta }
    }
}
