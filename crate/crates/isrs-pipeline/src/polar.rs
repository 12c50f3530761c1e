use std::str::FromStr;

use isrs_model::{angular_to_thz, SymmetryClass};
use isrs_perturb::Channel;

use crate::par::{self, Execution};
use crate::{delay_fourier, run_pump_probe_with, Experiment, PipelineError, Result, Window};

/// Peak Fourier amplitude of one mode against pump polarization angle.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarScan {
    pub channel: Channel,
    pub class: SymmetryClass,
    pub target_thz: f64,
    pub theta_deg: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub warnings: Vec<String>,
}

impl PolarScan {
    pub fn new(channel: Channel, class: SymmetryClass, target_thz: f64, theta_deg: Vec<f64>, amplitude: Vec<f64>) -> Result<Self> {
        if theta_deg.is_empty() || theta_deg.len() != amplitude.len() {
            return Err(PipelineError::invalid("polar scan", "angle and amplitude lists must match and be nonempty"));
        }
        if amplitude.iter().chain(&theta_deg).any(|v| !v.is_finite()) {
            return Err(PipelineError::invalid("polar scan", "non-finite entry"));
        }
        let span = theta_deg.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b))
            - theta_deg.iter().fold(f64::INFINITY, |a, b| a.min(*b));
        if span < 180.0 - 1e-9 {
            return Err(PipelineError::invalid("polar scan", format!("angles span {span}°, need at least 180°")));
        }
        Ok(Self { channel, class, target_thz, theta_deg, amplitude, warnings: Vec::new() })
    }
}

pub fn polar_scan(exp: &Experiment, theta_deg: &[f64], target: usize, channel: Channel, window: Window) -> Result<PolarScan> {
    polar_scan_with(exp, theta_deg, target, channel, window, Execution::Parallel)
}

/// Scans the pump angle with only mode `target` present and reads its
/// Fourier amplitude at the bin nearest its frequency.
pub fn polar_scan_with(
    exp: &Experiment,
    theta_deg: &[f64],
    target: usize,
    channel: Channel,
    window: Window,
    exec: Execution,
) -> Result<PolarScan> {
    let mode = *exp
        .modes
        .get(target)
        .ok_or_else(|| PipelineError::invalid("polar target", format!("mode index {target} out of range")))?;
    let single = exp.with_modes(vec![mode]);
    let f = angular_to_thz(mode.omega);
    let amps = par::map(exec, theta_deg, |&th| -> Result<(f64, f64)> {
        let run = run_pump_probe_with(&single.with_theta(th.to_radians()), Execution::Sequential)?;
        let spec = match channel {
            Channel::X => &run.x,
            Channel::Y => &run.y,
        };
        let ft = delay_fourier(spec, window, None)?;
        let k = ft.nearest(f);
        Ok((ft.summed[k], ft.freqs_thz[k]))
    });
    let mut amplitude = Vec::with_capacity(theta_deg.len());
    let mut read_at = f;
    for a in amps {
        let (v, fk) = a?;
        amplitude.push(v);
        read_at = fk;
    }
    let mut scan = PolarScan::new(channel, mode.class, f, theta_deg.to_vec(), amplitude)?;
    if (read_at - f).abs() > 1e-9 {
        scan.warnings.push(format!("{f:.4} THz is off the FFT grid; read the nearest bin at {read_at:.4} THz"));
    }
    Ok(scan)
}

/// Angular dependence fitted to `|amplitude|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarModel {
    Constant,
    Cos2Theta,
    Sin2Theta,
}

impl PolarModel {
    pub fn name(self) -> &'static str {
        match self {
            PolarModel::Constant => "constant",
            PolarModel::Cos2Theta => "cos2theta",
            PolarModel::Sin2Theta => "sin2theta",
        }
    }

    /// Expected law for a symmetry class.
    pub fn for_class(class: SymmetryClass) -> Self {
        match class {
            SymmetryClass::A => PolarModel::Constant,
            SymmetryClass::EL => PolarModel::Cos2Theta,
            SymmetryClass::ET => PolarModel::Sin2Theta,
        }
    }

    /// `|m(θ)|` with `θ` in degrees.
    pub fn eval(self, theta_deg: f64) -> f64 {
        let x = 2.0 * theta_deg.to_radians();
        match self {
            PolarModel::Constant => 1.0,
            PolarModel::Cos2Theta => x.cos().abs(),
            PolarModel::Sin2Theta => x.sin().abs(),
        }
    }
}

impl FromStr for PolarModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "constant" => Ok(PolarModel::Constant),
            "cos2theta" => Ok(PolarModel::Cos2Theta),
            "sin2theta" => Ok(PolarModel::Sin2Theta),
            other => Err(format!("unknown polar model `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: PolarModel,
    pub amplitude: f64,
    /// `‖y − a·m‖₂`.
    pub residual: f64,
    /// Uncentered `1 − ‖y − a·m‖²/‖y‖²`; `None` for all-zero data.
    pub r_squared: Option<f64>,
    /// Angles of sampled local minima below 1% of the largest amplitude.
    pub zero_crossings_deg: Vec<f64>,
}

/// Least-squares amplitude of `model` on the scan's `|amplitude|`.
pub fn fit_polar(scan: &PolarScan, model: PolarModel) -> Result<FitResult> {
    let n = scan.theta_deg.len();
    if n < 8 {
        return Err(PipelineError::invalid("polar fit", format!("{n} angles, need at least 8")));
    }
    let y: Vec<f64> = scan.amplitude.iter().map(|v| v.abs()).collect();
    let m: Vec<f64> = scan.theta_deg.iter().map(|t| model.eval(*t)).collect();
    let yy: f64 = y.iter().map(|v| v * v).sum();
    let mm: f64 = m.iter().map(|v| v * v).sum();
    let ym: f64 = y.iter().zip(&m).map(|(a, b)| a * b).sum();
    let amplitude = if mm > 0.0 { ym / mm } else { 0.0 };
    let ss: f64 = y.iter().zip(&m).map(|(a, b)| (a - amplitude * b).powi(2)).sum();
    let r_squared = (yy > 0.0).then(|| 1.0 - ss / yy);
    let peak = y.iter().fold(0.0f64, |a, b| a.max(*b));
    let zero_crossings_deg = (0..n)
        .filter(|&i| {
            peak > 0.0
                && y[i] < 0.01 * peak
                && (i == 0 || y[i] <= y[i - 1])
                && (i + 1 == n || y[i] <= y[i + 1])
        })
        .map(|i| scan.theta_deg[i])
        .collect();
    Ok(FitResult { model, amplitude, residual: ss.sqrt(), r_squared, zero_crossings_deg })
}
