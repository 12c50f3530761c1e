use std::path::Path;
use std::str::FromStr;

use isrs_model::{thz_to_angular, Chi0, FrequencyGrid, Interaction, PhononMode, PulseState, SymmetryClass, C64};
use isrs_oracle::{FockConfig, Method, OracleObservable, PhononInit, StudySetup};
use isrs_perturb::WeightVariant;
use isrs_pipeline::{snap_frequency, DelayAxis, Experiment, PulseSpec};
use serde::{Deserialize, Serialize};
use toml::de::{DeTable, DeValue};

use crate::CliError;

/// Amplitude and tilt of the pulse inside oracle runs. Small enough that
/// photon cutoffs of 2 to 3 hold the truncated coherent state, tilted so
/// that every symmetry class couples.
const ORACLE_ALPHA: f64 = 0.05;
const ORACLE_THETA_DEG: f64 = 17.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub center_thz: f64,
    pub span_thz: f64,
    pub spacing_thz: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { center_thz: 380.0, span_thz: 60.0, spacing_thz: 0.15 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PumpConfig {
    pub alpha0: f64,
    pub sigma_thz: f64,
    pub theta_deg: f64,
    /// Free-form label for the lab fluence this run stands in for.
    pub fluence_tag: String,
}

impl Default for PumpConfig {
    fn default() -> Self {
        Self { alpha0: 10.0, sigma_thz: 6.0, theta_deg: 0.0, fluence_tag: "0.8 mJ/cm2".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub alpha0: f64,
    pub sigma_thz: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { alpha0: 1.0, sigma_thz: 6.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Chi0Config {
    pub u: f64,
    pub w_abs: f64,
    pub phi: f64,
}

impl Default for Chi0Config {
    fn default() -> Self {
        Self { u: 0.3, w_abs: 0.05, phi: 0.6 }
    }
}

fn default_mass() -> f64 {
    1.0
}

fn default_beta() -> f64 {
    f64::INFINITY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    /// `A`, `E_L` or `E_T`.
    pub class: String,
    pub freq_thz: f64,
    pub coupling: f64,
    #[serde(default = "default_mass")]
    pub mass: f64,
    /// Inverse temperature; `inf` for the ground state.
    #[serde(default = "default_beta")]
    pub beta: f64,
}

impl ModeConfig {
    fn new(class: &str, freq_thz: f64, coupling: f64) -> Self {
        Self { class: class.into(), freq_thz, coupling, mass: 1.0, beta: f64::INFINITY }
    }
}

fn default_modes() -> Vec<ModeConfig> {
    vec![
        ModeConfig::new("E_L", 4.05, 1e-5),
        ModeConfig::new("E_T", 4.05, 1e-5),
        ModeConfig::new("A", 6.0, 1e-5),
        ModeConfig::new("A", 13.95, 5e-6),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InteractionConfig {
    pub tau: f64,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "V_S")]
    pub v_s: f64,
    /// `sm` or `main-text`.
    pub weight_variant: String,
}

impl Default for InteractionConfig {
    fn default() -> Self {
        Self { tau: 1.0, v: 1.0, v_s: 1.0, weight_variant: "sm".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub t_min_fs: f64,
    pub t_max_fs: f64,
    pub dt_fs: f64,
    pub theta_list_deg: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { t_min_fs: -300.0, t_max_fs: 2000.0, dt_fs: 6.7, theta_list_deg: (0..13).map(|k| 15.0 * k as f64).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    /// Also run the oracle check from `simulate`.
    pub enabled: bool,
    /// Photon bins per polarization; odd.
    pub bins: usize,
    pub photon_cutoff: usize,
    pub phonon_cutoff: usize,
    pub coupling_scales: Vec<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { enabled: false, bins: 3, photon_cutoff: 2, phonon_cutoff: 4, coupling_scales: vec![1e-3, 5e-4, 2.5e-4] }
    }
}

/// Full description of a run. An empty document yields the quartz preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub pump: PumpConfig,
    pub probe: ProbeConfig,
    pub chi0: Chi0Config,
    pub interaction: InteractionConfig,
    pub sweep: SweepConfig,
    pub oracle: OracleConfig,
    pub modes: Vec<ModeConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            pump: PumpConfig::default(),
            probe: ProbeConfig::default(),
            chi0: Chi0Config::default(),
            interaction: InteractionConfig::default(),
            sweep: SweepConfig::default(),
            oracle: OracleConfig::default(),
            modes: default_modes(),
        }
    }
}

/// A validated configuration plus the notes raised while loading it.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub warnings: Vec<String>,
}

/// Reads, snaps and validates a config file.
pub fn load_config(path: &Path) -> Result<LoadedConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    RunConfig::parse(&text)
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

/// Line of the value at a dotted key path like `modes[1].freq_thz`.
fn locate(src: &str, key: &str) -> Option<usize> {
    let root = DeTable::parse(src).ok()?;
    let mut parts = key.split('.');
    let first = parts.next()?;
    let mut value = lookup(root.get_ref(), first)?;
    for part in parts {
        match value.get_ref() {
            DeValue::Table(t) => value = lookup(t, part)?,
            _ => return None,
        }
    }
    Some(line_of(src, value.span().start))
}

fn lookup<'a, 'i>(table: &'a DeTable<'i>, part: &str) -> Option<&'a toml::Spanned<DeValue<'i>>> {
    let (name, index) = match part.split_once('[') {
        Some((n, rest)) => (n, Some(rest.trim_end_matches(']').parse::<usize>().ok()?)),
        None => (part, None),
    };
    let (_, v) = table.iter().find(|(k, _)| k.get_ref().as_ref() == name)?;
    match (index, v.get_ref()) {
        (None, _) => Some(v),
        (Some(i), DeValue::Array(a)) => a.get(i),
        _ => None,
    }
}

fn check(ok: bool, key: impl Into<String>, reason: impl Into<String>) -> Result<(), (String, String)> {
    if ok {
        Ok(())
    } else {
        Err((key.into(), reason.into()))
    }
}

fn positive(v: f64, key: &str) -> Result<(), (String, String)> {
    check(v.is_finite() && v > 0.0, key, format!("must be positive and finite, got {v}"))
}

fn finite(v: f64, key: &str) -> Result<(), (String, String)> {
    check(v.is_finite(), key, format!("must be finite, got {v}"))
}

impl RunConfig {
    /// Parses TOML text. Mode frequencies are snapped to the grid spacing and
    /// every snap is reported.
    pub fn parse(src: &str) -> Result<LoadedConfig, CliError> {
        let mut config: RunConfig = toml::from_str(src).map_err(|e| CliError::Parse(e.to_string().trim_end().to_string()))?;
        let warnings = config.snap();
        config.validate().map_err(|(key, reason)| CliError::Validation { line: locate(src, &key), key, reason })?;
        Ok(LoadedConfig { config, warnings })
    }

    /// Canonical TOML form; parsing it back gives the same config.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    fn snap(&mut self) -> Vec<String> {
        let spacing = self.grid.spacing_thz;
        if !(spacing.is_finite() && spacing > 0.0) {
            return Vec::new();
        }
        let mut notes = Vec::new();
        for (i, m) in self.modes.iter_mut().enumerate() {
            if !(m.freq_thz.is_finite() && m.freq_thz > 0.0) {
                continue;
            }
            let s = snap_frequency(m.freq_thz, spacing);
            if (s - m.freq_thz).abs() > 1e-9 * m.freq_thz.abs().max(1.0) {
                notes.push(format!("modes[{i}].freq_thz: {} THz snapped to {s} THz (grid spacing {spacing} THz)", m.freq_thz));
            }
            m.freq_thz = s;
        }
        notes
    }

    /// Half width `J` of the photon grid.
    pub fn half_width(&self) -> usize {
        (self.grid.span_thz / self.grid.spacing_thz / 2.0).round() as usize
    }

    fn validate(&self) -> Result<(), (String, String)> {
        let g = &self.grid;
        positive(g.center_thz, "grid.center_thz")?;
        positive(g.spacing_thz, "grid.spacing_thz")?;
        positive(g.span_thz, "grid.span_thz")?;
        let steps = g.span_thz / g.spacing_thz;
        check(
            (steps / 2.0 - (steps / 2.0).round()).abs() < 1e-6 && steps >= 1.5,
            "grid.span_thz",
            format!("must be a nonzero even multiple of the spacing, got {steps} spacings"),
        )?;
        check(g.center_thz > g.span_thz / 2.0, "grid.span_thz", "grid reaches nonpositive frequencies")?;
        finite(self.pump.alpha0, "pump.alpha0")?;
        positive(self.pump.sigma_thz, "pump.sigma_thz")?;
        finite(self.pump.theta_deg, "pump.theta_deg")?;
        finite(self.probe.alpha0, "probe.alpha0")?;
        positive(self.probe.sigma_thz, "probe.sigma_thz")?;
        finite(self.chi0.u, "chi0.u")?;
        finite(self.chi0.w_abs, "chi0.w_abs")?;
        check(self.chi0.w_abs >= 0.0, "chi0.w_abs", "must be nonnegative")?;
        finite(self.chi0.phi, "chi0.phi")?;
        let bins = 2 * self.half_width() + 1;
        check(!self.modes.is_empty(), "modes", "at least one phonon mode is required")?;
        for (i, m) in self.modes.iter().enumerate() {
            let key = |f: &str| format!("modes[{i}].{f}");
            check(SymmetryClass::from_str(&m.class).is_ok(), key("class"), format!("unknown class `{}` (expected A, E_L or E_T)", m.class))?;
            positive(m.freq_thz, &key("freq_thz"))?;
            let n = (m.freq_thz / g.spacing_thz).round() as usize;
            check(n >= 1 && n < bins, key("freq_thz"), format!("{} THz is off the {bins}-bin grid", m.freq_thz))?;
            finite(m.coupling, &key("coupling"))?;
            positive(m.mass, &key("mass"))?;
            check(m.beta > 0.0, key("beta"), format!("must be positive, got {}", m.beta))?;
        }
        let it = &self.interaction;
        positive(it.tau, "interaction.tau")?;
        positive(it.v, "interaction.V")?;
        positive(it.v_s, "interaction.V_S")?;
        check(WeightVariant::from_str(&it.weight_variant).is_ok(), "interaction.weight_variant", "expected `sm` or `main-text`")?;
        let s = &self.sweep;
        finite(s.t_min_fs, "sweep.t_min_fs")?;
        finite(s.t_max_fs, "sweep.t_max_fs")?;
        positive(s.dt_fs, "sweep.dt_fs")?;
        check(s.t_max_fs > 0.0 && s.t_max_fs > s.t_min_fs, "sweep.t_max_fs", "must be positive and above sweep.t_min_fs")?;
        check(s.t_max_fs / s.dt_fs >= 2.0, "sweep.dt_fs", "need at least two positive delays")?;
        check(s.theta_list_deg.iter().all(|t| t.is_finite()), "sweep.theta_list_deg", "angles must be finite")?;
        check(s.theta_list_deg.windows(2).all(|w| w[1] > w[0]), "sweep.theta_list_deg", "angles must increase")?;
        let span = s.theta_list_deg.last().zip(s.theta_list_deg.first()).map_or(0.0, |(b, a)| b - a);
        check(s.theta_list_deg.len() >= 8 && span >= 180.0, "sweep.theta_list_deg", "need at least 8 angles spanning 180 degrees")?;
        let o = &self.oracle;
        check(o.bins >= 3 && o.bins % 2 == 1, "oracle.bins", format!("must be odd and at least 3, got {}", o.bins))?;
        check(o.photon_cutoff >= 1, "oracle.photon_cutoff", "must be at least 1")?;
        check(o.phonon_cutoff >= 1, "oracle.phonon_cutoff", "must be at least 1")?;
        let cap = FockConfig::default().dim_cap as f64;
        let dim = ((o.photon_cutoff + 1) as f64).powi(2 * o.bins as i32) * (o.phonon_cutoff + 1) as f64;
        check(dim <= cap, "oracle.bins", format!("Hilbert space dimension {dim} exceeds the cap {cap}"))?;
        let sc = &o.coupling_scales;
        check(sc.len() >= 3 && sc.iter().all(|v| v.is_finite() && *v > 0.0), "oracle.coupling_scales", "need at least 3 positive scales")?;
        let r = sc[1] / sc[0];
        check(
            (r - 1.0).abs() > 1e-12 && sc.windows(2).all(|w| ((w[1] / w[0]) / r - 1.0).abs() <= 1e-9),
            "oracle.coupling_scales",
            "scales must form a geometric progression",
        )?;
        Ok(())
    }

    pub fn variant(&self) -> WeightVariant {
        WeightVariant::from_str(&self.interaction.weight_variant).expect("validated")
    }

    pub fn interaction(&self) -> Result<Interaction, CliError> {
        let it = &self.interaction;
        Ok(Interaction::new(it.tau, it.v, it.v_s)?)
    }

    pub fn phonon_modes(&self) -> Result<Vec<PhononMode>, CliError> {
        self.modes
            .iter()
            .map(|m| {
                let class = SymmetryClass::from_str(&m.class)?;
                Ok(PhononMode::new(thz_to_angular(m.freq_thz), m.mass, class, m.coupling, m.beta)?)
            })
            .collect()
    }

    pub fn experiment(&self) -> Result<Experiment, CliError> {
        let g = &self.grid;
        Ok(Experiment {
            grid: FrequencyGrid::new(thz_to_angular(g.center_thz), thz_to_angular(g.spacing_thz), self.half_width())?,
            pump: PulseSpec {
                alpha0: self.pump.alpha0,
                sigma: thz_to_angular(self.pump.sigma_thz),
                theta: self.pump.theta_deg.to_radians(),
            },
            probe: PulseSpec { alpha0: self.probe.alpha0, sigma: thz_to_angular(self.probe.sigma_thz), theta: 0.0 },
            chi0: Chi0::new(self.chi0.u, self.chi0.w_abs, self.chi0.phi),
            modes: self.phonon_modes()?,
            int: self.interaction()?,
            variant: self.variant(),
            delays: DelayAxis::new(self.sweep.t_min_fs, self.sweep.t_max_fs, self.sweep.dt_fs)?,
        })
    }

    /// Observables compared against the exact propagation at this photon
    /// cutoff.
    pub fn oracle_observables(&self) -> Vec<OracleObservable> {
        use OracleObservable::*;
        let mut obs = vec![Position, MomentumKick, IntensityFirstOrder];
        if self.oracle.photon_cutoff >= 3 {
            obs.extend([PhononNumber, IntensityFull, PumpShift]);
        }
        obs
    }

    /// One convergence study per distinct `(class, frequency)` mode, each on a
    /// reduced comb whose spacing equals the phonon frequency.
    pub fn oracle_setups(&self) -> Result<Vec<(String, StudySetup)>, CliError> {
        let int = self.interaction()?;
        let mut out: Vec<(String, StudySetup)> = Vec::new();
        for (m, raw) in self.phonon_modes()?.into_iter().zip(&self.modes) {
            let label = format!("{} {} THz", m.class, raw.freq_thz);
            if out.iter().any(|(l, _)| *l == label) {
                continue;
            }
            let grid = FrequencyGrid::new(thz_to_angular(self.grid.center_thz), m.omega, self.oracle.bins / 2)?;
            let phonon = if m.beta.is_finite() { PhononInit::Thermal { beta: m.beta } } else { PhononInit::Vacuum };
            let setup = StudySetup {
                grid,
                config: FockConfig {
                    photon_cutoff: self.oracle.photon_cutoff,
                    phonon_cutoff: self.oracle.phonon_cutoff,
                    ..Default::default()
                },
                omega: m.omega,
                mass: m.mass,
                class: m.class,
                int,
                chi0: Chi0::new(self.chi0.u, self.chi0.w_abs, self.chi0.phi),
                variant: self.variant(),
                pulse: PulseState::gaussian(grid, ORACLE_ALPHA, m.omega, ORACLE_THETA_DEG.to_radians())?,
                phonon,
                coherent_phonon: C64::new(0.3, 0.2),
                scales: self.oracle.coupling_scales.clone(),
                method: Method::Pade,
            };
            out.push((label, setup));
        }
        Ok(out)
    }
}
