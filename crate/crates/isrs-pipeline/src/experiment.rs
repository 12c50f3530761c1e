use isrs_model::{angular_to_thz, thz_to_angular, Chi0, FrequencyGrid, Interaction, PhononMode, PulseState, SymmetryClass};
use isrs_perturb::{pumped_modes, PumpedMode, WeightVariant};

use crate::{PipelineError, Result};

/// Gaussian pulse parameters; `sigma` is angular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub alpha0: f64,
    pub sigma: f64,
    /// Polarization angle from x (rad); the probe is always x-polarized.
    pub theta: f64,
}

/// Uniform delay axis `t_k = t_min + k·dt`, `t_k ≤ t_max`, in fs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayAxis {
    pub t_min_fs: f64,
    pub t_max_fs: f64,
    pub dt_fs: f64,
}

impl DelayAxis {
    pub fn new(t_min_fs: f64, t_max_fs: f64, dt_fs: f64) -> Result<Self> {
        if !(dt_fs > 0.0 && dt_fs.is_finite()) {
            return Err(PipelineError::invalid("delay step", format!("{dt_fs} fs must be positive")));
        }
        if !(t_min_fs.is_finite() && t_max_fs.is_finite() && t_max_fs > t_min_fs) {
            return Err(PipelineError::invalid("delay range", format!("[{t_min_fs}, {t_max_fs}] fs is empty")));
        }
        Ok(Self { t_min_fs, t_max_fs, dt_fs })
    }

    pub fn len(&self) -> usize {
        ((self.t_max_fs - self.t_min_fs) / self.dt_fs * (1.0 + 1e-12)).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.t_min_fs + k as f64 * self.dt_fs).collect()
    }
}

/// Nearest multiple of `spacing_thz` to `freq_thz`.
pub fn snap_frequency(freq_thz: f64, spacing_thz: f64) -> f64 {
    let n = (freq_thz / spacing_thz).round().max(1.0);
    // Rounded to 12 significant digits so the snapped value prints cleanly.
    let v = n * spacing_thz;
    let scale = 10f64.powi(11 - v.abs().log10().floor() as i32);
    (v * scale).round() / scale
}

/// One configured pump-probe experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub grid: FrequencyGrid,
    pub pump: PulseSpec,
    pub probe: PulseSpec,
    pub chi0: Chi0,
    pub modes: Vec<PhononMode>,
    pub int: Interaction,
    pub variant: WeightVariant,
    pub delays: DelayAxis,
}

impl Experiment {
    /// Quartz-like default: an E phonon at 4.05 THz (both components) and A
    /// phonons at 6.0 and 13.95 THz on a 350–410 THz grid with 0.15 THz bins.
    pub fn quartz() -> Self {
        let spacing = 0.15;
        let grid = FrequencyGrid::new(thz_to_angular(380.0), thz_to_angular(spacing), 200).expect("valid preset grid");
        let mode = |class, f: f64, c| {
            PhononMode::new(thz_to_angular(snap_frequency(f, spacing)), 1.0, class, c, f64::INFINITY).expect("valid preset mode")
        };
        Self {
            grid,
            pump: PulseSpec { alpha0: 10.0, sigma: thz_to_angular(6.0), theta: 0.0 },
            probe: PulseSpec { alpha0: 1.0, sigma: thz_to_angular(6.0), theta: 0.0 },
            chi0: Chi0::new(0.3, 0.05, 0.6),
            modes: vec![
                mode(SymmetryClass::EL, 4.0, 1e-5),
                mode(SymmetryClass::ET, 4.0, 1e-5),
                mode(SymmetryClass::A, 6.0, 1e-5),
                mode(SymmetryClass::A, 14.0, 5e-6),
            ],
            int: Interaction::new(1.0, 1.0, 1.0).expect("valid preset interaction"),
            variant: WeightVariant::Sm,
            delays: DelayAxis::new(-300.0, 2000.0, 6.7).expect("valid preset delays"),
        }
    }

    pub fn pump_pulse(&self) -> Result<PulseState> {
        Ok(PulseState::gaussian(self.grid, self.pump.alpha0, self.pump.sigma, self.pump.theta)?)
    }

    pub fn probe_pulse(&self) -> Result<PulseState> {
        Ok(PulseState::gaussian(self.grid, self.probe.alpha0, self.probe.sigma, 0.0)?)
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        let mut e = self.clone();
        e.pump.theta = theta;
        e
    }

    pub fn with_modes(&self, modes: Vec<PhononMode>) -> Self {
        Self { modes, ..self.clone() }
    }

    pub fn pumped_modes(&self) -> Result<Vec<PumpedMode>> {
        Ok(pumped_modes(&self.pump_pulse()?, &self.modes, &self.int, self.variant)?)
    }

    /// Notes on pulses that still carry weight where partner bins fall off
    /// the grid.
    pub fn edge_warnings(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        let j_max = self.grid.j_max();
        for m in &self.modes {
            let n = self.grid.offset(m.omega)? as i64;
            for (name, spec) in [("pump", self.pump), ("probe", self.probe)] {
                let edge = (j_max - n).max(0);
                let x = edge as f64 * self.grid.spacing() / spec.sigma;
                let weight = (-0.5 * x * x).exp();
                if weight > 1e-6 {
                    out.push(format!(
                        "{name} keeps relative amplitude {weight:.3e} within {n} bins of the grid edge ({} mode at {:.4} THz); partner bins beyond the edge are dropped",
                        m.class,
                        angular_to_thz(m.omega)
                    ));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping_to_the_grid() {
        assert_eq!(snap_frequency(4.0, 0.15), 4.05);
        assert_eq!(snap_frequency(6.0, 0.15), 6.0);
        assert_eq!(snap_frequency(14.0, 0.15), 13.95);
        assert_eq!(snap_frequency(0.01, 0.15), 0.15);
        let e = Experiment::quartz();
        let offsets: Vec<usize> = e.modes.iter().map(|m| e.grid.offset(m.omega).unwrap()).collect();
        assert_eq!(offsets, vec![27, 27, 40, 93]);
    }

    #[test]
    fn default_delay_axis() {
        let d = DelayAxis::new(-300.0, 2000.0, 6.7).unwrap();
        assert_eq!(d.len(), 344);
        let v = d.values();
        assert_eq!(v[0], -300.0);
        assert!(v[343] <= 2000.0 && v[343] > 2000.0 - 6.7);
        assert!(v.iter().filter(|t| **t > 0.0).count() == 299);
    }

    #[test]
    fn delay_axis_includes_exact_endpoint() {
        let d = DelayAxis::new(0.0, 1.0, 0.1).unwrap();
        assert_eq!(d.len(), 11);
        assert!(DelayAxis::new(0.0, 0.0, 0.1).is_err());
        assert!(DelayAxis::new(0.0, 1.0, 0.0).is_err());
    }
}
