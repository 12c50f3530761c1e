use isrs_model::{angular_to_thz, Polarization};
use isrs_perturb::{probe_response_x_terms, probe_response_y, Channel, ProbeGeometry, PumpedMode};

use crate::par::{self, Execution};
use crate::{Experiment, PipelineError, Result};

/// Probe modulation over delay and probe frequency for one analyzer channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    channel: Channel,
    delays_fs: Vec<f64>,
    freqs_thz: Vec<f64>,
    /// Row-major: one row of probe bins per delay.
    data: Vec<f64>,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

impl Spectrogram {
    pub fn new(channel: Channel, delays_fs: Vec<f64>, freqs_thz: Vec<f64>, data: Vec<f64>) -> Result<Self> {
        if delays_fs.is_empty() || freqs_thz.is_empty() {
            return Err(PipelineError::invalid("spectrogram", "empty axis"));
        }
        if !strictly_increasing(&delays_fs) || !strictly_increasing(&freqs_thz) {
            return Err(PipelineError::invalid("spectrogram", "axes must be finite and strictly increasing"));
        }
        if data.len() != delays_fs.len() * freqs_thz.len() {
            return Err(PipelineError::invalid(
                "spectrogram",
                format!("{} values for {}×{} axes", data.len(), delays_fs.len(), freqs_thz.len()),
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(PipelineError::invalid("spectrogram", "non-finite modulation"));
        }
        let n = freqs_thz.len();
        for (i, t) in delays_fs.iter().enumerate() {
            if *t < 0.0 && data[i * n..(i + 1) * n].iter().any(|v| *v != 0.0) {
                return Err(PipelineError::invalid("spectrogram", format!("nonzero row at negative delay {t} fs")));
            }
        }
        Ok(Self { channel, delays_fs, freqs_thz, data })
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn delays_fs(&self) -> &[f64] {
        &self.delays_fs
    }

    pub fn freqs_thz(&self) -> &[f64] {
        &self.freqs_thz
    }

    pub fn n_delays(&self) -> usize {
        self.delays_fs.len()
    }

    pub fn n_bins(&self) -> usize {
        self.freqs_thz.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n_bins();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn get(&self, delay: usize, bin: usize) -> f64 {
        self.data[delay * self.n_bins() + bin]
    }

    /// Channel-adapted scalar trace: the red-minus-blue difference for x′,
    /// which isolates the spectrally antisymmetric ISRS part, and the bin sum
    /// for y′.
    pub fn projection(&self) -> Vec<f64> {
        let n = self.n_bins();
        let center = n / 2;
        (0..self.n_delays())
            .map(|i| {
                let row = self.row(i);
                match self.channel {
                    Channel::X => {
                        row[..center].iter().sum::<f64>() - row[n - center..].iter().sum::<f64>()
                    }
                    Channel::Y => row.iter().sum(),
                }
            })
            .collect()
    }
}

/// Both analyzer channels of one delay sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpProbe {
    pub x: Spectrogram,
    pub y: Spectrogram,
    /// Momentum-driven (ISRS) part of `x`.
    pub x_isrs: Spectrogram,
    pub modes: Vec<PumpedMode>,
    pub warnings: Vec<String>,
}

pub fn run_pump_probe(exp: &Experiment) -> Result<PumpProbe> {
    run_pump_probe_with(exp, Execution::Parallel)
}

/// Delay sweep: pumped-mode radii, free evolution and the analytic probe
/// response per delay, normalized by the unperturbed peak probe intensity.
pub fn run_pump_probe_with(exp: &Experiment, exec: Execution) -> Result<PumpProbe> {
    let probe = exp.probe_pulse()?;
    let modes = exp.pumped_modes()?;
    let geom = ProbeGeometry { tau: exp.int.tau, w_abs: exp.chi0.w_abs, phi: exp.chi0.phi, variant: exp.variant };
    let norm = probe.intensity(Polarization::X, 0);
    let delays = exp.delays.values();
    let rows = par::map(exec, &delays, |&t_fs| -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let t = t_fs * 1e-3;
        let xt = probe_response_x_terms(&probe, t, &modes, &geom)?;
        let y = probe_response_y(&probe, t, &modes, &geom)?;
        let x = xt.isrs.iter().zip(&xt.transverse).map(|(a, b)| (a + b) / norm).collect();
        let isrs = xt.isrs.iter().map(|a| a / norm).collect();
        Ok((x, y.iter().map(|v| v / norm).collect(), isrs))
    });
    let nb = exp.grid.len();
    let (mut x, mut y, mut xi) =
        (Vec::with_capacity(delays.len() * nb), Vec::with_capacity(delays.len() * nb), Vec::with_capacity(delays.len() * nb));
    for r in rows {
        let (a, b, c) = r?;
        x.extend(a);
        y.extend(b);
        xi.extend(c);
    }
    let freqs: Vec<f64> = exp.grid.frequencies().into_iter().map(angular_to_thz).collect();
    let mut warnings = exp.edge_warnings()?;
    warnings.push(
        "the impulsive model has no pulse envelope; delays within the 40 fs pulse overlap are not physical".to_string(),
    );
    Ok(PumpProbe {
        x: Spectrogram::new(Channel::X, delays.clone(), freqs.clone(), x)?,
        y: Spectrogram::new(Channel::Y, delays.clone(), freqs.clone(), y)?,
        x_isrs: Spectrogram::new(Channel::X, delays, freqs, xi)?,
        modes,
        warnings,
    })
}

/// Positive delays where `|cos Ωt|` and `|sin Ωt|` peak; the earliest wins ties.
pub fn display_delays(delays_fs: &[f64], omega: f64) -> Option<(f64, f64)> {
    let pos: Vec<f64> = delays_fs.iter().copied().filter(|t| *t > 0.0).collect();
    let best = |f: &dyn Fn(f64) -> f64| {
        pos.iter().copied().fold(None, |acc: Option<(f64, f64)>, t| {
            let v = f(omega * t * 1e-3).abs();
            match acc {
                Some((_, bv)) if bv >= v => acc,
                _ => Some((t, v)),
            }
        })
    };
    Some((best(&f64::cos)?.0, best(&f64::sin)?.0))
}
