use std::fmt;
use std::str::FromStr;

use crate::{Interaction, ModelError, C64};

/// Real 2×2 matrix indexed `[row][col]` with rows/cols ordered (x, y).
pub type Mat2 = [[f64; 2]; 2];

/// Raman-tensor symmetry classes of the quartz phonons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymmetryClass {
    /// Totally symmetric, `diag(a, a)`.
    A,
    /// Longitudinal E component, `diag(c_L, −c_L)`.
    EL,
    /// Transverse E component, `[[0, −c_T], [−c_T, 0]]`.
    ET,
}

impl SymmetryClass {
    pub const ALL: [SymmetryClass; 3] = [SymmetryClass::A, SymmetryClass::EL, SymmetryClass::ET];

    pub fn name(self) -> &'static str {
        match self {
            SymmetryClass::A => "A",
            SymmetryClass::EL => "E_L",
            SymmetryClass::ET => "E_T",
        }
    }

    /// Splits a real symmetric matrix into its `(a, c_L, c_T)` components,
    /// the inverse of summing [`chi1_matrix`] over the three classes.
    pub fn decompose(m: &Mat2) -> (f64, f64, f64) {
        (0.5 * (m[0][0] + m[1][1]), 0.5 * (m[0][0] - m[1][1]), -0.5 * (m[0][1] + m[1][0]))
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SymmetryClass {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" => Ok(SymmetryClass::A),
            "E_L" | "EL" => Ok(SymmetryClass::EL),
            "E_T" | "ET" => Ok(SymmetryClass::ET),
            _ => Err(ModelError::Unsupported("symmetry class must be one of A, E_L, E_T")),
        }
    }
}

/// Raman tensor `χ⁽¹⁾` of a symmetry class with scalar coupling.
pub fn chi1_matrix(class: SymmetryClass, coupling: f64) -> Mat2 {
    let c = coupling;
    match class {
        SymmetryClass::A => [[c, 0.0], [0.0, c]],
        SymmetryClass::EL => [[c, 0.0], [0.0, -c]],
        SymmetryClass::ET => [[0.0, -c], [-c, 0.0]],
    }
}

/// Equilibrium susceptibility `[[u, |w|e^{iφ}], [|w|e^{−iφ}, u]]`.
pub fn chi0_matrix(u: f64, w_abs: f64, phi: f64) -> [[C64; 2]; 2] {
    let off = C64::from_polar(w_abs, phi);
    [[C64::new(u, 0.0), off], [off.conj(), C64::new(u, 0.0)]]
}

/// Equilibrium refractive parameters; `|w|` sets the rotation, `φ` the ellipticity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi0 {
    pub u: f64,
    pub w_abs: f64,
    pub phi: f64,
}

impl Chi0 {
    pub fn new(u: f64, w_abs: f64, phi: f64) -> Self {
        Self { u, w_abs, phi }
    }

    pub fn matrix(&self) -> [[C64; 2]; 2] {
        chi0_matrix(self.u, self.w_abs, self.phi)
    }

    /// Real part of the off-diagonal element, `w̄ = |w| cos φ`.
    pub fn w_bar(&self) -> f64 {
        self.w_abs * self.phi.cos()
    }

    /// Bulk rotation generator `[[u, w̄], [w̄, u]]`.
    pub fn effective(&self) -> Mat2 {
        let wb = self.w_bar();
        [[self.u, wb], [wb, self.u]]
    }

    /// Analyzer generator `[[u, |w|], [|w|, u]]`: compensates rotation but not ellipticity.
    pub fn rot(&self) -> Mat2 {
        [[self.u, self.w_abs], [self.w_abs, self.u]]
    }
}

/// One Raman-active mode's tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi1Mode {
    pub class: SymmetryClass,
    pub coupling: f64,
}

impl Chi1Mode {
    pub fn matrix(&self) -> Mat2 {
        chi1_matrix(self.class, self.coupling)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SusceptibilityModel {
    pub chi0: Chi0,
    pub chi1_modes: Vec<Chi1Mode>,
    pub interaction: Interaction,
}
