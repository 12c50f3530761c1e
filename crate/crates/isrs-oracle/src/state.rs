use isrs_model::{Polarization, PulseState, C64};
use isrs_perturb::PhononMoments;

use crate::hamiltonian::{PhononFactor, QuadraticTerm};
use crate::{analyzer_hamiltonian, Method, OracleError, OracleSystem, Propagator, Result};

/// Initial phonon state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhononInit {
    Vacuum,
    /// Truncated Gibbs state at inverse temperature `β`.
    Thermal { beta: f64 },
    /// Truncated, renormalized coherent state `|β⟩`.
    Coherent(C64),
}

/// Weighted ensemble of pure states; weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    pub components: Vec<(f64, Vec<C64>)>,
}

impl MixedState {
    pub fn pure(psi: Vec<C64>) -> Self {
        Self { components: vec![(1.0, psi)] }
    }

    pub fn dim(&self) -> usize {
        self.components.first().map_or(0, |c| c.1.len())
    }

    /// Applies a map to every component.
    pub fn map(&self, f: impl Fn(&[C64]) -> Result<Vec<C64>>) -> Result<Self> {
        let components = self.components.iter().map(|(w, v)| Ok((*w, f(v)?))).collect::<Result<_>>()?;
        Ok(Self { components })
    }

    pub fn evolve(&self, u: &Propagator) -> Result<Self> {
        self.map(|v| u.apply(v))
    }

    /// Largest deviation of a component norm from one.
    pub fn norm_error(&self) -> f64 {
        self.components
            .iter()
            .map(|(_, v)| (v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Normalized coherent-state coefficients truncated at `cutoff`.
fn truncated_coherent(alpha: C64, cutoff: usize) -> Vec<C64> {
    let mut c = Vec::with_capacity(cutoff + 1);
    let mut term = C64::new(1.0, 0.0);
    for k in 0..=cutoff {
        if k > 0 {
            term = term * alpha / (k as f64).sqrt();
        }
        c.push(term);
    }
    let norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    c.iter().map(|x| x / norm).collect()
}

/// `⟨a⟩` of a single-mode state given by its Fock coefficients.
fn lowering_mean(c: &[C64]) -> C64 {
    (0..c.len().saturating_sub(1)).map(|k| ((k + 1) as f64).sqrt() * c[k].conj() * c[k + 1]).sum()
}

fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Product of truncated coherent photon states (one per mode) and the
/// phonon state, plus the pulse of effective amplitudes `⟨a_{λj}⟩` of the
/// truncated photon states.
pub fn initial_state(system: &OracleSystem, pulse: &PulseState, phonon: &PhononInit) -> Result<(MixedState, PulseState)> {
    let basis = &system.basis;
    let grid = *basis.grid();
    if pulse.grid() != &grid {
        return Err(OracleError::Study("pulse grid differs from the oracle grid".into()));
    }
    let cut = basis.photon_cutoff();
    let mut photons = vec![C64::new(1.0, 0.0)];
    let mut eff = [vec![C64::new(0.0, 0.0); grid.len()], vec![C64::new(0.0, 0.0); grid.len()]];
    for pol in Polarization::BOTH {
        for (i, j) in grid.j_values().enumerate() {
            let c = truncated_coherent(pulse.amp(pol, j), cut);
            eff[pol.index()][i] = lowering_mean(&c);
            photons = kron(&photons, &c);
        }
    }
    let pc = basis.phonon_cutoff();
    let fock = |m: usize| {
        let mut v = vec![C64::new(0.0, 0.0); pc + 1];
        v[m] = C64::new(1.0, 0.0);
        v
    };
    let components = match *phonon {
        PhononInit::Vacuum => vec![(1.0, kron(&photons, &fock(0)))],
        PhononInit::Coherent(beta) => vec![(1.0, kron(&photons, &truncated_coherent(beta, pc)))],
        PhononInit::Thermal { beta } => {
            if beta.is_nan() || beta < 0.0 {
                return Err(OracleError::Study(format!("inverse temperature {beta} must be non-negative")));
            }
            if beta.is_infinite() {
                vec![(1.0, kron(&photons, &fock(0)))]
            } else {
                let x = (-beta * system.mode.omega).exp();
                let w: Vec<f64> = (0..=pc).map(|m| x.powi(m as i32)).collect();
                let z: f64 = w.iter().sum();
                (0..=pc).map(|m| (w[m] / z, kron(&photons, &fock(m)))).collect()
            }
        }
    };
    let eff_pulse = PulseState::from_amplitudes(grid, &eff[0], &eff[1])?;
    Ok((MixedState { components }, eff_pulse))
}

/// Observables available to [`expect`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    Position,
    Momentum,
    PhononNumber,
    PhotonNumber { pol: Polarization, j: i64 },
    /// Intensity of bin `(λ, j)`; the photon number in these units.
    Intensity { pol: Polarization, j: i64 },
    TotalPhotonNumber,
}

fn observable_terms(system: &OracleSystem, obs: &Observable) -> Result<Vec<QuadraticTerm>> {
    let mw = system.mode.mass * system.mode.omega;
    let vs = system.int.v_s;
    let term = |coef: C64, photon, phonon| QuadraticTerm { coef, photon, phonon };
    Ok(match *obs {
        Observable::Position => {
            let k = C64::new(1.0 / (2.0 * mw * vs).sqrt(), 0.0);
            vec![term(k, None, PhononFactor::Create), term(k, None, PhononFactor::Annihilate)]
        }
        Observable::Momentum => {
            let k = (mw / (2.0 * vs)).sqrt();
            vec![term(C64::new(0.0, k), None, PhononFactor::Create), term(C64::new(0.0, -k), None, PhononFactor::Annihilate)]
        }
        Observable::PhononNumber => vec![term(C64::new(1.0, 0.0), None, PhononFactor::Number)],
        Observable::PhotonNumber { pol, j } | Observable::Intensity { pol, j } => {
            let p = system
                .basis
                .mode(pol, j)
                .ok_or_else(|| OracleError::Study(format!("bin {j} is not on the grid")))?;
            vec![term(C64::new(1.0, 0.0), Some((p, p)), PhononFactor::None)]
        }
        Observable::TotalPhotonNumber => (0..system.basis.photon_modes())
            .map(|p| term(C64::new(1.0, 0.0), Some((p, p)), PhononFactor::None))
            .collect(),
    })
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check_dim(system: &OracleSystem, state: &MixedState) -> Result<()> {
    for (_, v) in &state.components {
        if v.len() != system.basis.dim() {
            return Err(OracleError::BasisMismatch { expected: system.basis.dim(), got: v.len() });
        }
    }
    Ok(())
}

/// `Tr ρ O` as a complex number; the imaginary part is rounding only.
pub fn expect_complex(system: &OracleSystem, state: &MixedState, obs: &Observable) -> Result<C64> {
    check_dim(system, state)?;
    let terms = observable_terms(system, obs)?;
    let mut acc = C64::new(0.0, 0.0);
    for (w, v) in &state.components {
        acc += inner(v, &system.apply_terms(&terms, v)?) * *w;
    }
    Ok(acc)
}

/// `Tr ρ O` for a Hermitian observable.
pub fn expect(system: &OracleSystem, state: &MixedState, obs: &Observable) -> Result<f64> {
    Ok(expect_complex(system, state, obs)?.re)
}

/// Phonon moments `⟨b⟩`, `⟨b²⟩`, `⟨b†b⟩`, `⟨bb†⟩` in the truncated space.
pub fn phonon_moments(system: &OracleSystem, state: &MixedState) -> Result<PhononMoments> {
    check_dim(system, state)?;
    let one = C64::new(1.0, 0.0);
    let lower = [QuadraticTerm { coef: one, photon: None, phonon: PhononFactor::Annihilate }];
    let raise = [QuadraticTerm { coef: one, photon: None, phonon: PhononFactor::Create }];
    let mut m = PhononMoments { b: C64::new(0.0, 0.0), b2: C64::new(0.0, 0.0), bdb: 0.0, bbd: 0.0 };
    for (w, v) in &state.components {
        let bv = system.apply_terms(&lower, v)?;
        let bbv = system.apply_terms(&lower, &bv)?;
        let dv = system.apply_terms(&raise, v)?;
        m.b += inner(v, &bv) * *w;
        m.b2 += inner(v, &bbv) * *w;
        m.bdb += inner(&bv, &bv).re * w;
        m.bbd += inner(&dv, &dv).re * w;
    }
    Ok(m)
}

/// `⟨g⟩` and `⟨g†g⟩` of `g = Σ χ⁽¹⁾_{λλ′} w_j a†_{λj} a_{λ′,j+n}` with the
/// mode's raw tensor and the system's weight variant.
pub fn pair_moments(system: &OracleSystem, state: &MixedState) -> Result<(f64, f64)> {
    check_dim(system, state)?;
    let grid = *system.basis.grid();
    let n = system.offset();
    let chi = system.mode.chi1();
    let mut terms = Vec::new();
    for j in grid.j_values().filter(|&j| grid.index_of(j + n).is_some()) {
        let w = system.variant.weight(&grid, j);
        for (l, pl) in Polarization::BOTH.into_iter().enumerate() {
            for (r, pr) in Polarization::BOTH.into_iter().enumerate() {
                if chi[l][r] != 0.0 {
                    let photon = Some((system.basis.mode(pl, j).unwrap(), system.basis.mode(pr, j + n).unwrap()));
                    terms.push(QuadraticTerm { coef: C64::new(chi[l][r] * w, 0.0), photon, phonon: PhononFactor::None });
                }
            }
        }
    }
    let (mut g, mut gg) = (0.0, 0.0);
    for (w, v) in &state.components {
        let gv = system.apply_terms(&terms, v)?;
        g += inner(v, &gv).re * w;
        gg += inner(&gv, &gv).re * w;
    }
    Ok((g, gg))
}

/// Rotates the transmitted state into the analyzer frame, `e^{+iτH_Rot} ψ`.
pub fn apply_analyzer(system: &OracleSystem, state: &MixedState, method: Method) -> Result<MixedState> {
    let h = analyzer_hamiltonian(system)?;
    let u = Propagator::new(&h, -system.int.tau, method)?;
    state.evolve(&u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{build_total_hamiltonian, propagate, FockConfig, HamiltonianTerms, Ref1Mode};
    use approx::assert_relative_eq;
    use isrs_model::{Chi0, FrequencyGrid, Interaction, PhononMode, SymmetryClass};
    use isrs_perturb::{rotation_matrix, WeightVariant};

    fn system(photon_cutoff: usize, phonon_cutoff: usize, chi0: Chi0, coupling: f64) -> OracleSystem {
        let g = FrequencyGrid::new(50.0, 1.0, 1).unwrap();
        let mode = PhononMode::new(1.0, 2.0, SymmetryClass::ET, coupling, f64::INFINITY).unwrap();
        let int = Interaction::new(0.8, 2.0, 1.5).unwrap();
        let cfg = FockConfig { photon_cutoff, phonon_cutoff, ..Default::default() };
        OracleSystem::new(g, &cfg, mode, int, chi0, WeightVariant::Sm).unwrap()
    }

    fn pulse(s: &OracleSystem, a: f64, theta: f64) -> PulseState {
        PulseState::gaussian(*s.basis.grid(), a, 1.0, theta).unwrap()
    }

    #[test]
    fn vacuum_position_is_zero() {
        let s = system(1, 3, Chi0::new(0.0, 0.0, 0.0), 0.0);
        let (st, _) = initial_state(&s, &pulse(&s, 0.3, 0.2), &PhononInit::Vacuum).unwrap();
        assert_eq!(expect(&s, &st, &Observable::Position).unwrap(), 0.0);
        assert!(st.norm_error() < 1e-15);
    }

    #[test]
    fn coherent_displacement_converges_with_cutoff() {
        // Real β gives ⟨q⟩ = 2β/√(2mΩV_S) in the untruncated limit.
        let beta = 0.6;
        let mut errs = Vec::new();
        for cut in [2, 4, 8, 12] {
            let s = system(1, cut, Chi0::new(0.0, 0.0, 0.0), 0.0);
            let want = 2.0 * beta / (2.0 * 2.0 * 1.0 * 1.5f64).sqrt();
            let (st, _) = initial_state(&s, &pulse(&s, 0.1, 0.0), &PhononInit::Coherent(C64::new(beta, 0.0))).unwrap();
            errs.push((expect(&s, &st, &Observable::Position).unwrap() / want - 1.0).abs());
        }
        assert!(errs.windows(2).all(|w| w[1] < w[0]));
        assert!(errs[3] < 1e-9);
    }

    #[test]
    fn thermal_occupation_converges_with_cutoff() {
        let beta = 1.2;
        let n_bar = 1.0 / (beta * 1.0f64).exp_m1();
        let mut errs = Vec::new();
        for cut in [2, 5, 10, 20] {
            let s = system(1, cut, Chi0::new(0.0, 0.0, 0.0), 0.0);
            let (st, _) = initial_state(&s, &pulse(&s, 0.1, 0.0), &PhononInit::Thermal { beta }).unwrap();
            errs.push((expect(&s, &st, &Observable::PhononNumber).unwrap() - n_bar).abs());
            let m = phonon_moments(&s, &st).unwrap();
            assert_eq!(m.b, C64::new(0.0, 0.0));
        }
        assert!(errs.windows(2).all(|w| w[1] < w[0]));
        assert!(errs[3] < 1e-8);
    }

    #[test]
    fn effective_amplitudes_match_expectations() {
        let s = system(2, 1, Chi0::new(0.0, 0.0, 0.0), 0.0);
        let p = pulse(&s, 0.4, 0.5);
        let (st, eff) = initial_state(&s, &p, &PhononInit::Vacuum).unwrap();
        let ann: Vec<QuadraticTerm> = Vec::new();
        let _ = ann;
        for pol in Polarization::BOTH {
            for j in -1..=1 {
                let a = eff.amp(pol, j);
                assert!(a.norm() < p.amp(pol, j).norm() + 1e-15);
                let n = expect(&s, &st, &Observable::PhotonNumber { pol, j }).unwrap();
                // Truncation makes ⟨n⟩ ≥ |⟨a⟩|² with equality only in the vacuum.
                assert!(n >= a.norm_sqr() - 1e-15);
            }
        }
    }

    #[test]
    fn moments_of_truncated_coherent_state() {
        let s = system(1, 30, Chi0::new(0.0, 0.0, 0.0), 0.0);
        let beta = C64::new(0.4, -0.7);
        let (st, _) = initial_state(&s, &pulse(&s, 0.1, 0.0), &PhononInit::Coherent(beta)).unwrap();
        let m = phonon_moments(&s, &st).unwrap();
        assert!((m.b - beta).norm() < 1e-12);
        assert!((m.b2 - beta * beta).norm() < 1e-12);
        assert_relative_eq!(m.bdb, beta.norm_sqr(), max_relative = 1e-12);
        assert_relative_eq!(m.bbd, beta.norm_sqr() + 1.0, max_relative = 1e-12);
    }

    // A single photon under H_Ref⁽⁰⁾ alone follows the closed-form 2×2 rotation.
    #[test]
    fn polarization_rotation_matches_closed_form() {
        let chi0 = Chi0::new(0.37, 0.81, 0.4);
        let s = system(1, 0, chi0, 0.0);
        let b = &s.basis;
        let terms = HamiltonianTerms { ref0: true, ref1: Ref1Mode::Off, raman: false };
        let h = build_total_hamiltonian(&s, &terms).unwrap();
        let x0 = b.mode(Polarization::X, 0).unwrap();
        let y0 = b.mode(Polarization::Y, 0).unwrap();
        let mut occ = vec![0; 6];
        occ[x0] = 1;
        let from = b.encode(&occ, 0);
        occ[x0] = 0;
        occ[y0] = 1;
        let to_y = b.encode(&occ, 0);
        let mut psi = vec![C64::new(0.0, 0.0); b.dim()];
        psi[from] = C64::new(1.0, 0.0);
        for tau in [0.3, 1.1, 2.9] {
            let out = propagate(&psi, &h, tau).unwrap();
            let r = rotation_matrix(tau, &chi0.effective());
            // Heisenberg a_μ → Σ R_{μλ} a_λ; Schrödinger amplitudes follow Rᵀ.
            assert!((out[from] - r[0][0]).norm() < 1e-12);
            assert!((out[to_y] - r[0][1]).norm() < 1e-12);
        }
    }

    #[test]
    fn propagation_routes_agree() {
        let s = system(2, 3, Chi0::new(0.3, 0.2, 0.6), 0.9);
        let (st, _) = initial_state(&s, &pulse(&s, 0.5, 0.4), &PhononInit::Coherent(C64::new(0.2, 0.1))).unwrap();
        let psi = &st.components[0].1;
        for terms in [HamiltonianTerms::full(Ref1Mode::Operator), HamiltonianTerms::raman_only()] {
            let h = build_total_hamiltonian(&s, &terms).unwrap();
            let a = Propagator::new(&h, 0.7, Method::Pade).unwrap();
            let e = Propagator::new(&h, 0.7, Method::Eigen).unwrap();
            assert!(a.unitarity_error() < 1e-10);
            let (va, ve) = (a.apply(psi).unwrap(), e.apply(psi).unwrap());
            assert!(va.iter().zip(&ve).all(|(x, y)| (x - y).norm() < 1e-10));
            let norm: f64 = va.iter().map(|x| x.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-10);
            let half = Propagator::new(&h, 0.35, Method::Pade).unwrap();
            let twice = half.apply(&half.apply(psi).unwrap()).unwrap();
            assert!(twice.iter().zip(&va).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt() < 1e-9);
            let n0 = expect(&s, &st, &Observable::TotalPhotonNumber).unwrap();
            let n1 = expect(&s, &MixedState::pure(va), &Observable::TotalPhotonNumber).unwrap();
            assert!((n1 - n0).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_hamiltonian_keeps_state() {
        let s = system(1, 2, Chi0::new(0.0, 0.0, 0.0), 0.0);
        let (st, _) = initial_state(&s, &pulse(&s, 0.5, 0.4), &PhononInit::Vacuum).unwrap();
        let h = build_total_hamiltonian(&s, &HamiltonianTerms::full(Ref1Mode::Operator)).unwrap();
        let out = propagate(&st.components[0].1, &h, 3.0).unwrap();
        assert_eq!(out, st.components[0].1);
    }

    #[test]
    fn basis_mismatch_is_reported() {
        let s = system(1, 2, Chi0::new(0.0, 0.0, 0.0), 0.0);
        let bad = MixedState::pure(vec![C64::new(1.0, 0.0); 3]);
        assert!(matches!(expect(&s, &bad, &Observable::Momentum), Err(OracleError::BasisMismatch { .. })));
        let hermitian = expect_complex(&s, &initial_state(&s, &pulse(&s, 0.5, 0.4), &PhononInit::Coherent(C64::new(0.3, 0.2))).unwrap().0, &Observable::Momentum).unwrap();
        assert!(hermitian.im.abs() < 1e-12);
    }
}
