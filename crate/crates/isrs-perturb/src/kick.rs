use isrs_model::{Interaction, PhononMode, PhononPhaseState};

use crate::OverlapSum;

/// Mean phonon state right after a pulse: `q` unchanged, `p → p + τγ/(2V)`.
pub fn phonon_kick(state: PhononPhaseState, overlap: &OverlapSum, tau: f64, v: f64) -> PhononPhaseState {
    PhononPhaseState { q: state.q, p: state.p + tau * overlap.gamma / (2.0 * v) }
}

/// Photonic second moment `⟨g†g⟩` entering the phonon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GdagG {
    /// Coherent light: `⟨g†g⟩ = γ²`.
    Classical,
    Value(f64),
}

/// `⟨N(τ)⟩ = ⟨N(0)⟩ + (τV_S/2VmΩ) γ ⟨p(0)⟩ + (τ²V_S/8V²mΩ) ⟨g†g⟩`.
pub fn phonon_number(
    n0: f64,
    p0: f64,
    overlap: &OverlapSum,
    mode: &PhononMode,
    int: &Interaction,
    gdg: GdagG,
) -> f64 {
    let (tau, v, vs) = (int.tau, int.v, int.v_s);
    let mw = mode.mass * mode.omega;
    let g2 = match gdg {
        GdagG::Classical => overlap.gamma * overlap.gamma,
        GdagG::Value(x) => x,
    };
    n0 + tau * vs / (2.0 * v * mw) * overlap.gamma * p0 + tau * tau * vs / (8.0 * v * v * mw) * g2
}

/// Free, undamped oscillation after a kick of radius `R` at `t = 0`:
/// `q = (R/mΩ) sin Ωt`, `p = R cos Ωt`; zero before the kick.
pub fn free_evolve(r: f64, omega: f64, mass: f64, t: f64) -> PhononPhaseState {
    if t < 0.0 {
        return PhononPhaseState::default();
    }
    PhononPhaseState::from_radius(r, omega * t, mass, omega)
}

/// Physical momentum radius `−2τR√(mΩ/2V_S)` of a mode radius `R` built
/// from effective couplings.
pub fn momentum_radius(r: f64, mode: &PhononMode, int: &Interaction) -> f64 {
    -2.0 * int.tau * r * (mode.mass * mode.omega / (2.0 * int.v_s)).sqrt()
}
