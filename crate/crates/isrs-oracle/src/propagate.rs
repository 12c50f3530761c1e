use isrs_model::C64;
use nalgebra::DMatrix;
use ndarray::Array2;

use crate::{expm, par, OperatorMatrix, OracleError, Result};

/// Route used to exponentiate each Hermitian block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Scaling-and-squaring Padé.
    #[default]
    Pade,
    /// Hermitian eigendecomposition.
    Eigen,
}

/// Cached block unitaries `exp(−iτH_b)`.
#[derive(Debug, Clone)]
pub struct Propagator {
    dim: usize,
    blocks: Vec<(Vec<usize>, Array2<C64>)>,
}

fn eigen_unitary(h: &Array2<C64>, tau: f64) -> Array2<C64> {
    let n = h.nrows();
    let m = DMatrix::from_fn(n, n, |r, c| h[[r, c]]);
    let eig = m.symmetric_eigen();
    let phases: Vec<C64> = eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -tau * l)).collect();
    let v = &eig.eigenvectors;
    Array2::from_shape_fn((n, n), |(r, c)| (0..n).map(|k| v[(r, k)] * phases[k] * v[(c, k)].conj()).sum())
}

impl Propagator {
    pub fn new(h: &OperatorMatrix, tau: f64, method: Method) -> Result<Self> {
        if !tau.is_finite() {
            return Err(OracleError::NonFinite("propagation time"));
        }
        let unitaries = par::map(h.blocks(), |b| -> Result<Array2<C64>> {
            match method {
                Method::Pade => expm(&b.matrix.mapv(|v| v * C64::new(0.0, -tau))),
                Method::Eigen => Ok(eigen_unitary(&b.matrix, tau)),
            }
        });
        let mut blocks = Vec::with_capacity(unitaries.len());
        for (b, u) in h.blocks().iter().zip(unitaries) {
            blocks.push((b.indices.clone(), u?));
        }
        Ok(Self { dim: h.dim(), blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `ψ ↦ exp(−iτH) ψ`.
    pub fn apply(&self, psi: &[C64]) -> Result<Vec<C64>> {
        if psi.len() != self.dim {
            return Err(OracleError::BasisMismatch { expected: self.dim, got: psi.len() });
        }
        // Indices outside every block are annihilated by H and pass through.
        let mut out = psi.to_vec();
        for (idx, u) in &self.blocks {
            if idx.iter().all(|&i| psi[i] == C64::new(0.0, 0.0)) {
                continue;
            }
            for (r, &gr) in idx.iter().enumerate() {
                let mut s = C64::new(0.0, 0.0);
                for (c, &gc) in idx.iter().enumerate() {
                    s += u[[r, c]] * psi[gc];
                }
                out[gr] = s;
            }
        }
        Ok(out)
    }

    /// Largest `‖U_b U_b† − 1‖_max` over blocks.
    pub fn unitarity_error(&self) -> f64 {
        self.blocks
            .iter()
            .map(|(_, u)| {
                let p = u.dot(&u.t().mapv(|v| v.conj()));
                p.indexed_iter()
                    .map(|((r, c), v)| (v - if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// One-shot `exp(−iτH) ψ` via Padé.
pub fn propagate(psi: &[C64], h: &OperatorMatrix, tau: f64) -> Result<Vec<C64>> {
    if psi.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(OracleError::NonFinite("state"));
    }
    Propagator::new(h, tau, Method::Pade)?.apply(psi)
}
