use isrs_model::{Chi0, Interaction, ModelError, PhononMode, PhononPhaseState, Polarization, PulseState, Result, SymmetryClass};

use crate::{pair_overlap, WeightVariant};

/// Analyzer channel after the sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// Parallel to the probe, `x′`.
    X,
    /// Crossed, `y′`.
    Y,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::X => "x'",
            Channel::Y => "y'",
        }
    }
}

impl std::str::FromStr for Channel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "x" | "x'" | "parallel" => Ok(Channel::X),
            "y" | "y'" | "cross" => Ok(Channel::Y),
            other => Err(format!("unknown channel `{other}` (expected x or y)")),
        }
    }
}

/// Probe-side parameters shared by every mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeGeometry {
    pub tau: f64,
    /// Modulus `|w|` of the off-diagonal equilibrium susceptibility.
    pub w_abs: f64,
    /// Ellipticity phase `φ`.
    pub phi: f64,
    pub variant: WeightVariant,
}

/// A phonon mode after the pump has passed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpedMode {
    pub class: SymmetryClass,
    pub omega: f64,
    /// Grid offset `Ω/δ`.
    pub offset: i64,
    /// Effective coupling component (`a`, `c_L` or `c_T` of `χ̃`).
    pub coupling: f64,
    pub eta: f64,
    pub radius: f64,
}

/// Leading-order radius: `aη`, `c_L cos2θ η` or `−c_T sin2θ η`.
pub fn mode_radius(class: SymmetryClass, coupling: f64, theta: f64, eta: f64) -> f64 {
    match class {
        SymmetryClass::A => coupling * eta,
        SymmetryClass::EL => coupling * (2.0 * theta).cos() * eta,
        SymmetryClass::ET => -coupling * (2.0 * theta).sin() * eta,
    }
}

/// Radii of every mode excited by a linearly polarized pump.
pub fn pumped_modes(
    pump: &PulseState,
    modes: &[PhononMode],
    int: &Interaction,
    variant: WeightVariant,
) -> Result<Vec<PumpedMode>> {
    let theta = pump.theta().ok_or(ModelError::Unsupported("pump must carry a polarization angle"))?;
    let grid = pump.grid();
    modes
        .iter()
        .map(|m| {
            let offset = grid.offset(m.omega)? as i64;
            let eta = pair_overlap(pump, offset, variant);
            let coupling = m.effective(m.coupling, grid.center(), int);
            let radius = mode_radius(m.class, coupling, theta, eta);
            Ok(PumpedMode { class: m.class, omega: m.omega, offset, coupling, eta, radius })
        })
        .collect()
}

/// The x′ response split into its momentum (ISRS) and transverse-position parts.
#[derive(Debug, Clone, PartialEq)]
pub struct XTerms {
    pub isrs: Vec<f64>,
    pub transverse: Vec<f64>,
}

fn x_only(probe: &PulseState) -> Result<()> {
    if probe.polarization(Polarization::Y).iter().any(|a| a.norm_sqr() != 0.0) {
        return Err(ModelError::Unsupported("probe must be x-polarized"));
    }
    Ok(())
}

/// Per-bin `(d_k, s_k, e_k)`: `|α_k|(|α_{k−n}| − |α_{k+n}|)`,
/// `|α_k|(|α_{k+n}| + |α_{k−n}|)` and `|α_k|²`.
fn bin_factors(probe: &PulseState, k: i64, n: i64) -> (f64, f64, f64) {
    let a = |j| probe.modulus(Polarization::X, j);
    let ak = a(k);
    (ak * (a(k - n) - a(k + n)), ak * (a(k + n) + a(k - n)), ak * ak)
}

/// Transverse-position (E_T) bin factor. The position coupling enters
/// through both the Raman and the refractive term, the latter with weight 4.
fn transverse_factor(s: f64, e: f64) -> f64 {
    s + 4.0 * e
}

pub fn probe_response_x_terms(probe: &PulseState, t: f64, modes: &[PumpedMode], geom: &ProbeGeometry) -> Result<XTerms> {
    x_only(probe)?;
    let grid = probe.grid();
    let mut out = XTerms { isrs: vec![0.0; grid.len()], transverse: vec![0.0; grid.len()] };
    if t < 0.0 {
        return Ok(out);
    }
    let tau = geom.tau;
    let ell = geom.w_abs * tau * (geom.phi.cos() - 1.0);
    for m in modes {
        let (sin, cos) = (m.omega * t).sin_cos();
        for (i, k) in grid.j_values().enumerate() {
            let f = geom.variant.relative(grid, k);
            let (d, s, e) = bin_factors(probe, k, m.offset);
            match m.class {
                SymmetryClass::A | SymmetryClass::EL => {
                    out.isrs[i] += -2.0 * m.coupling * tau * tau * m.radius * d * cos * f;
                }
                SymmetryClass::ET => {
                    out.transverse[i] +=
                        -2.0 * m.coupling * tau * tau * ell * m.radius * sin * transverse_factor(s, e) * f;
                }
            }
        }
    }
    Ok(out)
}

/// Parallel-channel modulation at delay `t`, modes summed independently.
pub fn probe_response_x(probe: &PulseState, t: f64, modes: &[PumpedMode], geom: &ProbeGeometry) -> Result<Vec<f64>> {
    let terms = probe_response_x_terms(probe, t, modes, geom)?;
    Ok(terms.isrs.iter().zip(&terms.transverse).map(|(a, b)| a + b).collect())
}

/// Crossed-channel modulation at delay `t`; only E_T contributes to first order in `wτ`.
pub fn probe_response_y(probe: &PulseState, t: f64, modes: &[PumpedMode], geom: &ProbeGeometry) -> Result<Vec<f64>> {
    x_only(probe)?;
    let grid = probe.grid();
    let mut out = vec![0.0; grid.len()];
    if t < 0.0 {
        return Ok(out);
    }
    let tau = geom.tau;
    let ell = geom.w_abs * tau * (geom.phi.cos() - 1.0);
    for m in modes.iter().filter(|m| m.class == SymmetryClass::ET) {
        let sin = (m.omega * t).sin();
        for (i, k) in grid.j_values().enumerate() {
            let f = geom.variant.relative(grid, k);
            let (_, s, e) = bin_factors(probe, k, m.offset);
            out[i] += 2.0 * m.coupling * tau * tau * ell * m.radius * sin * transverse_factor(s, e) * f;
        }
    }
    Ok(out)
}

/// Position- and momentum-driven parts of a probe modulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeModulation {
    pub lrm: Vec<f64>,
    pub isrs: Vec<f64>,
}

impl ProbeModulation {
    pub fn total(&self) -> Vec<f64> {
        self.lrm.iter().zip(&self.isrs).map(|(a, b)| a + b).collect()
    }
}

/// `sin(x)/x` with the removable point filled in.
fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Modulation of an x-polarized probe by a phonon with mean position `q` and
/// momentum `p`, seen through the compensating analyzer.
///
/// Exact in `wτ`, first order in `χ⁽¹⁾`; second-order probe self-interaction
/// is dropped.
pub fn generic_probe_modulation(
    probe: &PulseState,
    state: PhononPhaseState,
    mode: &PhononMode,
    int: &Interaction,
    chi0: &Chi0,
    variant: WeightVariant,
    channel: Channel,
) -> Result<ProbeModulation> {
    x_only(probe)?;
    let grid = probe.grid();
    let n = grid.offset(mode.omega)? as i64;
    let omega0 = grid.center();
    let chi = mode.chi1();
    let eff = [
        [mode.effective(chi[0][0], omega0, int), mode.effective(chi[0][1], omega0, int)],
        [mode.effective(chi[1][0], omega0, int), mode.effective(chi[1][1], omega0, int)],
    ];
    let (a, cl, ct) = SymmetryClass::decompose(&eff);
    let mw = mode.mass * mode.omega;
    let big_q = state.q * (2.0 * mw * int.v_s).sqrt();
    let big_p = state.p * (2.0 * int.v_s / mw).sqrt();

    let tau = int.tau;
    let wb = chi0.w_bar();
    let dw = tau * (wb - chi0.w_abs);
    let s2 = (2.0 * dw).sin();
    let (sd, cd) = dw.sin_cos();
    // Analyzer weight of the rotated-back probe and the sign of the S cross terms.
    let (b, sign) = match channel {
        Channel::Y => (sd * sd, -1.0),
        Channel::X => (cd * cd, 1.0),
    };
    let g1 = tau * sinc(2.0 * wb * tau);
    let g2 = tau * (wb * tau).sin() * sinc(wb * tau);

    let mut out = ProbeModulation { lrm: vec![0.0; grid.len()], isrs: vec![0.0; grid.len()] };
    for (i, k) in grid.j_values().enumerate() {
        let f = variant.relative(grid, k);
        let (d, s, e) = bin_factors(probe, k, n);
        let isrs = tau * a * d * big_p * b + cl * d * big_p * (b * g1 + sign * 0.5 * s2 * g2)
            + sign * 0.5 * ct * tau * s2 * s * big_q;
        out.isrs[i] = f * isrs;
        out.lrm[i] = f * sign * 2.0 * ct * tau * s2 * e * big_q;
    }
    Ok(out)
}
