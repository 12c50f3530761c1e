use crate::{chi1_matrix, Mat2, ModelError, Result, SymmetryClass};

/// Interaction time and volume factors shared by every coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    /// Crossing time `τ` of the pulse through the sample (ps).
    pub tau: f64,
    /// Field quantization volume `V`.
    pub v: f64,
    /// Sample volume `V_S`.
    pub v_s: f64,
}

impl Interaction {
    pub fn new(tau: f64, v: f64, v_s: f64) -> Result<Self> {
        for (name, x) in [("tau", tau), ("V", v), ("V_S", v_s)] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(ModelError::param(name, x, "must be positive and finite"));
            }
        }
        Ok(Self { tau, v, v_s })
    }
}

/// A single Raman-active phonon mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononMode {
    pub omega: f64,
    pub mass: f64,
    pub class: SymmetryClass,
    pub coupling: f64,
    /// Inverse temperature of the initial thermal state; `f64::INFINITY` is the ground state.
    pub beta: f64,
}

impl PhononMode {
    pub fn new(omega: f64, mass: f64, class: SymmetryClass, coupling: f64, beta: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(ModelError::param("omega", omega, "must be positive and finite"));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(ModelError::param("mass", mass, "must be positive and finite"));
        }
        if !coupling.is_finite() {
            return Err(ModelError::param("coupling", coupling, "must be finite"));
        }
        if beta.is_nan() || beta < 0.0 {
            return Err(ModelError::param("beta", beta, "must be non-negative"));
        }
        Ok(Self { omega, mass, class, coupling, beta })
    }

    pub fn chi1(&self) -> Mat2 {
        chi1_matrix(self.class, self.coupling)
    }

    /// `√V_S / (2V √(2mΩ))`, the prefactor of the Raman Hamiltonian.
    pub fn raman_scale(&self, int: &Interaction) -> f64 {
        int.v_s.sqrt() / (2.0 * int.v * (2.0 * self.mass * self.omega).sqrt())
    }

    /// Effective coupling `χ̃ = −ω₀ √V_S/(2V√(2mΩ)) · χ` for a raw tensor entry `chi`.
    pub fn effective(&self, chi: f64, omega0: f64, int: &Interaction) -> f64 {
        -omega0 * self.raman_scale(int) * chi
    }

    /// Bose occupation `1/(e^{βΩ} − 1)`; zero at `β = ∞`.
    pub fn mean_occupation(&self) -> f64 {
        if self.beta.is_infinite() {
            0.0
        } else {
            1.0 / (self.beta * self.omega).exp_m1()
        }
    }
}

/// Mean phonon position and momentum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhononPhaseState {
    pub q: f64,
    pub p: f64,
}

impl PhononPhaseState {
    pub fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }

    /// Point on the free trajectory of radius `R` at phase `Ωt`:
    /// `p = R cos Ωt`, `q = (R/mΩ) sin Ωt`.
    pub fn from_radius(r: f64, phase: f64, mass: f64, omega: f64) -> Self {
        let (s, c) = phase.sin_cos();
        Self { q: r / (mass * omega) * s, p: r * c }
    }

    pub fn radius(&self, mass: f64, omega: f64) -> f64 {
        (mass * omega * self.q).hypot(self.p)
    }

    pub fn phase(&self, mass: f64, omega: f64) -> f64 {
        (mass * omega * self.q).atan2(self.p)
    }
}
