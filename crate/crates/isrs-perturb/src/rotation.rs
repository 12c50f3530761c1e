use isrs_model::{Mat2, C64};

/// Complex 2×2 matrix indexed `[row][col]`, rows/cols ordered (x, y).
pub type CMat2 = [[C64; 2]; 2];

/// `R(s) = cos(sχ̃⁽⁰⁾) − i sin(sχ̃⁽⁰⁾)` for `χ̃⁽⁰⁾ = [[u, w̄], [w̄, u]]`.
///
/// Only `chi[0][0]` and `chi[0][1]` are read.
pub fn rotation_matrix(s: f64, chi: &Mat2) -> CMat2 {
    let (u, wb) = (chi[0][0], chi[0][1]);
    let (su, cu) = (s * u).sin_cos();
    let (sw, cw) = (s * wb).sin_cos();
    let diag = C64::new(cu * cw, -su * cw);
    let off = C64::new(-su * sw, -cu * sw);
    [[diag, off], [off, diag]]
}

/// Analyzer mixing coefficients of the y′ channel; the x′ channel follows
/// from `Aˣ = Bʸ`, `Bˣ = Aʸ`, `Dˣ = −Dʸ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerCoefficients {
    pub a_y: f64,
    pub b_y: f64,
    pub d_y: C64,
}

impl AnalyzerCoefficients {
    pub fn a_x(&self) -> f64 {
        self.b_y
    }

    pub fn b_x(&self) -> f64 {
        self.a_y
    }

    pub fn d_x(&self) -> C64 {
        -self.d_y
    }
}

pub fn analyzer_coefficients(tau: f64, w_bar: f64, w: f64) -> AnalyzerCoefficients {
    let x = tau * (w_bar - w);
    let (s, c) = x.sin_cos();
    AnalyzerCoefficients { a_y: c * c, b_y: s * s, d_y: C64::new(0.0, 0.5 * (2.0 * x).sin()) }
}
