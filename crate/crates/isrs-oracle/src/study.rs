use isrs_model::{Chi0, FrequencyGrid, Interaction, PhononMode, PhononPhaseState, Polarization, PulseState, SymmetryClass, C64};
use isrs_perturb::{
    first_order_intensity, generic_probe_modulation, intensity_eq13, overlap_sums, phonon_kick, phonon_number, Channel,
    GdagG, PhononMoments, WeightVariant,
};

use crate::{
    apply_analyzer, build_total_hamiltonian, expect, initial_state, pair_moments, par, phonon_moments, FockConfig,
    HamiltonianTerms, Method, MixedState, Observable, OracleError, OracleSystem, PhononInit, Propagator, Ref1Mode,
    Result,
};

/// Quantities compared between the truncated-Fock evolution and the
/// perturbative formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleObservable {
    /// `mΩ|Δq| / |Δp_pert|`; zero at first order.
    Position,
    /// Relative error of the momentum kick.
    MomentumKick,
    /// Relative error of the phonon-number increment.
    PhononNumber,
    /// Largest absolute bin error of the momentum-driven intensity change.
    IntensityFirstOrder,
    /// Largest bin error of the second-order intensity change, relative to
    /// the largest first-order change.
    IntensityFull,
    /// Relative error of the pump spectral shift off an equilibrium phonon.
    PumpShift,
    /// Largest absolute bin error of the analyzer-frame probe modulation.
    ProbeModulation(Channel),
    /// `|Δp_operator − Δp_mean-field|`, the displacive part dropped by the
    /// mean-field refractive coupling; first order in the coupling.
    Ref1Toggle,
}

impl OracleObservable {
    pub fn name(self) -> &'static str {
        match self {
            OracleObservable::Position => "position",
            OracleObservable::MomentumKick => "momentum_kick",
            OracleObservable::PhononNumber => "phonon_number",
            OracleObservable::IntensityFirstOrder => "intensity_first_order",
            OracleObservable::IntensityFull => "intensity_full",
            OracleObservable::PumpShift => "pump_shift",
            OracleObservable::ProbeModulation(Channel::X) => "probe_modulation_x",
            OracleObservable::ProbeModulation(Channel::Y) => "probe_modulation_y",
            OracleObservable::Ref1Toggle => "ref1_toggle",
        }
    }

    pub fn expected_exponent(self) -> f64 {
        match self {
            OracleObservable::Ref1Toggle => 1.0,
            _ => 2.0,
        }
    }
}

/// Everything but the coupling strength of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySetup {
    pub grid: FrequencyGrid,
    pub config: FockConfig,
    pub omega: f64,
    pub mass: f64,
    pub class: SymmetryClass,
    pub int: Interaction,
    /// Equilibrium couplings; only the probe-modulation study switches them on.
    pub chi0: Chi0,
    pub variant: WeightVariant,
    /// Nominal photon amplitudes; truncated coherent states are built from them.
    pub pulse: PulseState,
    /// Phonon state for the kick, number, pump-shift and toggle studies.
    pub phonon: PhononInit,
    /// Coherent phonon amplitude for the intensity and modulation studies.
    pub coherent_phonon: C64,
    /// Scales `s = τ max|χ̃|`, in geometric progression.
    pub scales: Vec<f64>,
    pub method: Method,
}

impl StudySetup {
    fn validate(&self) -> Result<()> {
        let s = &self.scales;
        if s.len() < 3 {
            return Err(OracleError::Study(format!("need at least 3 scales, got {}", s.len())));
        }
        if s.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(OracleError::Study("scales must be positive and finite".into()));
        }
        let r = s[1] / s[0];
        if (r - 1.0).abs() < 1e-12 || s.windows(2).any(|w| ((w[1] / w[0]) / r - 1.0).abs() > 1e-9) {
            return Err(OracleError::Study("scales must form a non-constant geometric progression".into()));
        }
        Ok(())
    }

    /// Raw coupling giving `τ ω₀ κ |χ| = s`.
    pub fn coupling_for(&self, scale: f64) -> Result<f64> {
        let probe = PhononMode::new(self.omega, self.mass, self.class, 1.0, f64::INFINITY)?;
        Ok(scale / (self.int.tau * self.grid.center() * probe.raman_scale(&self.int)))
    }

    fn system(&self, scale: f64, chi0: Chi0) -> Result<OracleSystem> {
        let mode = PhononMode::new(self.omega, self.mass, self.class, self.coupling_for(scale)?, f64::INFINITY)?;
        OracleSystem::new(self.grid, &self.config, mode, self.int, chi0, self.variant)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyStatus {
    /// Fitted exponent within 0.2 of the expected one.
    Converged,
    /// Residuals shrink monotonically but at the wrong rate.
    OutOfBounds,
    /// Residuals do not shrink monotonically.
    Inconclusive,
    /// Residuals vanish to rounding at every scale.
    Exact,
}

impl StudyStatus {
    pub fn name(self) -> &'static str {
        match self {
            StudyStatus::Converged => "converged",
            StudyStatus::OutOfBounds => "out_of_bounds",
            StudyStatus::Inconclusive => "inconclusive",
            StudyStatus::Exact => "exact",
        }
    }

    /// Whether the study supports the perturbative formula.
    pub fn passed(self) -> bool {
        matches!(self, StudyStatus::Converged | StudyStatus::Exact)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scale: f64,
    pub exact: f64,
    pub perturbative: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    /// Quantity whose scaling is fitted.
    pub residual: f64,
    /// Residual over the signal size, used for the exactness test.
    normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableReport {
    pub observable: OracleObservable,
    pub rows: Vec<ReportRow>,
    pub expected_exponent: f64,
    /// Log-log slope; `None` when exact.
    pub exponent: Option<f64>,
    pub prefactor: Option<f64>,
    pub status: StudyStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub entries: Vec<ObservableReport>,
}

impl OracleReport {
    pub fn get(&self, obs: OracleObservable) -> Option<&ObservableReport> {
        self.entries.iter().find(|e| e.observable == obs)
    }
}

const EXACT_TOL: f64 = 1e-12;

fn row(scale: f64, exact: f64, perturbative: f64, residual: f64, normalized: f64) -> ReportRow {
    let abs_error = (exact - perturbative).abs();
    let rel_error = if perturbative != 0.0 { abs_error / perturbative.abs() } else { f64::INFINITY };
    ReportRow { scale, exact, perturbative, abs_error, rel_error, residual, normalized }
}

fn relative(scale: f64, exact: f64, pert: f64) -> Result<ReportRow> {
    if pert == 0.0 {
        return Err(OracleError::Study("perturbative reference vanishes; relative residual undefined".into()));
    }
    let r = (exact - pert).abs() / pert.abs();
    Ok(row(scale, exact, pert, r, r))
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().map(f64::abs).fold(0.0, f64::max)
}

fn bin_intensities(system: &OracleSystem, state: &MixedState) -> Result<Vec<f64>> {
    let grid = *system.basis.grid();
    let mut out = Vec::with_capacity(2 * grid.len());
    for pol in Polarization::BOTH {
        for j in grid.j_values() {
            out.push(expect(system, state, &Observable::PhotonNumber { pol, j })?);
        }
    }
    Ok(out)
}

fn evolve(system: &OracleSystem, terms: &HamiltonianTerms, state: &MixedState, method: Method) -> Result<MixedState> {
    let h = build_total_hamiltonian(system, terms)?;
    state.evolve(&Propagator::new(&h, system.int.tau, method)?)
}

fn phase_state(m: &PhononMoments, mode: &PhononMode, int: &Interaction) -> PhononPhaseState {
    PhononPhaseState::new(m.position(mode, int), m.momentum(mode, int))
}

/// Comparison for one observable at one scale.
fn measure(setup: &StudySetup, obs: OracleObservable, scale: f64) -> Result<ReportRow> {
    let method = setup.method;
    let zero_chi0 = Chi0::new(0.0, 0.0, 0.0);
    match obs {
        OracleObservable::Position | OracleObservable::MomentumKick | OracleObservable::PhononNumber => {
            let sys = setup.system(scale, zero_chi0)?;
            let (s0, eff) = initial_state(&sys, &setup.pulse, &setup.phonon)?;
            let s1 = evolve(&sys, &HamiltonianTerms::raman_only(), &s0, method)?;
            let (mode, int) = (sys.mode, sys.int);
            let overlap = overlap_sums(&eff, &mode.chi1(), mode.omega, setup.variant)?;
            let p0 = expect(&sys, &s0, &Observable::Momentum)?;
            let dp_pert = phonon_kick(PhononPhaseState::new(0.0, p0), &overlap, int.tau, int.v).p - p0;
            match obs {
                OracleObservable::MomentumKick => {
                    relative(scale, expect(&sys, &s1, &Observable::Momentum)? - p0, dp_pert)
                }
                OracleObservable::Position => {
                    let dq = expect(&sys, &s1, &Observable::Position)? - expect(&sys, &s0, &Observable::Position)?;
                    if dp_pert == 0.0 {
                        return Err(OracleError::Study("vanishing kick; position residual undefined".into()));
                    }
                    let r = mode.mass * mode.omega * dq.abs() / dp_pert.abs();
                    Ok(row(scale, dq, 0.0, r, r))
                }
                _ => {
                    let n0 = expect(&sys, &s0, &Observable::PhononNumber)?;
                    let n1 = expect(&sys, &s1, &Observable::PhononNumber)?;
                    let (_, gg) = pair_moments(&sys, &s0)?;
                    let pert = phonon_number(n0, p0, &overlap, &mode, &int, GdagG::Value(gg)) - n0;
                    relative(scale, n1 - n0, pert)
                }
            }
        }
        OracleObservable::IntensityFirstOrder | OracleObservable::IntensityFull => {
            let sys = setup.system(scale, zero_chi0)?;
            let (s0, eff) = initial_state(&sys, &setup.pulse, &PhononInit::Coherent(setup.coherent_phonon))?;
            let s1 = evolve(&sys, &HamiltonianTerms::raman_only(), &s0, method)?;
            let (i0, i1) = (bin_intensities(&sys, &s0)?, bin_intensities(&sys, &s1)?);
            let exact: Vec<f64> = i1.iter().zip(&i0).map(|(a, b)| a - b).collect();
            let p0 = expect(&sys, &s0, &Observable::Momentum)?;
            let first = first_order_intensity(&eff, &sys.mode, &sys.int, setup.variant, p0)?;
            let first: Vec<f64> = first.x.iter().chain(&first.y).copied().collect();
            let pert = if obs == OracleObservable::IntensityFirstOrder {
                first.clone()
            } else {
                let m = phonon_moments(&sys, &s0)?;
                let full = intensity_eq13(&eff, &sys.mode, &sys.int, setup.variant, &m)?;
                let base = eff.as_slice().iter().map(|a| a.norm_sqr());
                full.x.iter().chain(&full.y).zip(base).map(|(a, b)| a - b).collect()
            };
            let err = max_abs(exact.iter().zip(&pert).map(|(a, b)| a - b));
            let signal = max_abs(first.iter().copied());
            if signal == 0.0 {
                return Err(OracleError::Study("first-order intensity change vanishes".into()));
            }
            let (residual, normalized) =
                if obs == OracleObservable::IntensityFirstOrder { (err, err / signal) } else { (err / signal, err / signal) };
            Ok(row(scale, max_abs(exact), max_abs(pert), residual, normalized))
        }
        OracleObservable::PumpShift => {
            if matches!(setup.phonon, PhononInit::Coherent(_)) {
                return Err(OracleError::Study("pump shift needs an equilibrium phonon state".into()));
            }
            let sys = setup.system(scale, zero_chi0)?;
            let (s0, eff) = initial_state(&sys, &setup.pulse, &setup.phonon)?;
            let s1 = evolve(&sys, &HamiltonianTerms::raman_only(), &s0, method)?;
            let (i0, i1) = (bin_intensities(&sys, &s0)?, bin_intensities(&sys, &s1)?);
            let m = phonon_moments(&sys, &s0)?;
            let full = intensity_eq13(&eff, &sys.mode, &sys.int, setup.variant, &m)?;
            let base = eff.as_slice().iter().map(|a| a.norm_sqr());
            let pert: Vec<f64> = full.x.iter().chain(&full.y).zip(base).map(|(a, b)| a - b).collect();
            let err = max_abs(i1.iter().zip(&i0).zip(&pert).map(|((a, b), c)| a - b - c));
            let signal = max_abs(pert.iter().copied());
            if signal == 0.0 {
                return Err(OracleError::Study("pump shift vanishes".into()));
            }
            let exact = max_abs(i1.iter().zip(&i0).map(|(a, b)| a - b));
            Ok(row(scale, exact, signal, err / signal, err / signal))
        }
        OracleObservable::ProbeModulation(channel) => {
            let sys = setup.system(scale, setup.chi0)?;
            let (driven, eff) = initial_state(&sys, &setup.pulse, &PhononInit::Coherent(setup.coherent_phonon))?;
            let (rest, _) = initial_state(&sys, &setup.pulse, &PhononInit::Vacuum)?;
            let m = phonon_moments(&sys, &driven)?;
            let q_mean = 2.0 * m.b.re;
            let out_d = evolve(&sys, &HamiltonianTerms::full(Ref1Mode::MeanField(q_mean)), &driven, method)?;
            let out_r = evolve(&sys, &HamiltonianTerms::full(Ref1Mode::MeanField(0.0)), &rest, method)?;
            let (out_d, out_r) = (apply_analyzer(&sys, &out_d, method)?, apply_analyzer(&sys, &out_r, method)?);
            let pol = match channel {
                Channel::X => Polarization::X,
                Channel::Y => Polarization::Y,
            };
            let grid = *sys.basis.grid();
            let mut exact = Vec::with_capacity(grid.len());
            for j in grid.j_values() {
                let o = Observable::PhotonNumber { pol, j };
                exact.push(expect(&sys, &out_d, &o)? - expect(&sys, &out_r, &o)?);
            }
            let state = phase_state(&m, &sys.mode, &sys.int);
            let pert = generic_probe_modulation(&eff, state, &sys.mode, &sys.int, &sys.chi0, setup.variant, channel)?.total();
            let err = max_abs(exact.iter().zip(&pert).map(|(a, b)| a - b));
            let signal = max_abs(pert.iter().copied());
            if signal == 0.0 {
                return Err(OracleError::Study("probe modulation vanishes for this setup".into()));
            }
            Ok(row(scale, max_abs(exact), signal, err, err / signal))
        }
        OracleObservable::Ref1Toggle => {
            let sys = setup.system(scale, setup.chi0)?;
            let (s0, _) = initial_state(&sys, &setup.pulse, &setup.phonon)?;
            let m = phonon_moments(&sys, &s0)?;
            let p0 = expect(&sys, &s0, &Observable::Momentum)?;
            let op = evolve(&sys, &HamiltonianTerms::full(Ref1Mode::Operator), &s0, method)?;
            let mf = evolve(&sys, &HamiltonianTerms::full(Ref1Mode::MeanField(2.0 * m.b.re)), &s0, method)?;
            let dp_op = expect(&sys, &op, &Observable::Momentum)? - p0;
            let dp_mf = expect(&sys, &mf, &Observable::Momentum)? - p0;
            let d = (dp_op - dp_mf).abs();
            let signal = dp_op.abs().max(dp_mf.abs());
            Ok(row(scale, dp_op, dp_mf, d, if signal > 0.0 { d / signal } else { 0.0 }))
        }
    }
}

/// Least-squares slope and intercept of `ln r` against `ln s`.
fn loglog_fit(rows: &[ReportRow]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.scale.ln(), r.residual.ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn classify(observable: OracleObservable, rows: Vec<ReportRow>) -> ObservableReport {
    let expected = observable.expected_exponent();
    let done = |exponent, prefactor, status| ObservableReport {
        observable,
        rows: rows.clone(),
        expected_exponent: expected,
        exponent,
        prefactor,
        status,
    };
    if rows.iter().all(|r| r.normalized <= EXACT_TOL) {
        return done(None, None, StudyStatus::Exact);
    }
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.scale.total_cmp(&b.scale));
    let monotone = sorted.iter().all(|r| r.residual > 0.0 && r.residual.is_finite())
        && sorted.windows(2).all(|w| w[0].residual < w[1].residual);
    if !monotone {
        return done(None, None, StudyStatus::Inconclusive);
    }
    let (slope, intercept) = loglog_fit(&rows);
    let status = if (slope - expected).abs() <= 0.2 { StudyStatus::Converged } else { StudyStatus::OutOfBounds };
    done(Some(slope), Some(intercept.exp()), status)
}

/// Runs every requested comparison at every scale.
pub fn convergence_study(setup: &StudySetup, observables: &[OracleObservable]) -> Result<OracleReport> {
    setup.validate()?;
    let jobs: Vec<(OracleObservable, f64)> =
        observables.iter().flat_map(|&o| setup.scales.iter().map(move |&s| (o, s))).collect();
    let results = par::map(&jobs, |&(o, s)| measure(setup, o, s));
    let mut it = results.into_iter();
    let mut entries = Vec::with_capacity(observables.len());
    for &o in observables {
        let rows = it.by_ref().take(setup.scales.len()).collect::<Result<Vec<_>>>()?;
        entries.push(classify(o, rows));
    }
    Ok(OracleReport { entries })
}
