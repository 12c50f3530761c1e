use isrs_model::{angular_to_thz, Polarization};
use isrs_perturb::pump_transmission;

use crate::{Experiment, Result};

/// Spectral centroid of the pump before and after the sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RedShift {
    pub centroid_thz: f64,
    pub transmitted_centroid_thz: f64,
    /// Transmitted minus incident centroid; negative for a red shift.
    pub shift_thz: f64,
}

/// Centroid shift of the transmitted pump off equilibrium phonons, with the
/// modes' spectral changes added independently.
pub fn pump_red_shift(exp: &Experiment) -> Result<RedShift> {
    let pump = exp.pump_pulse()?;
    let grid = exp.grid;
    let n = grid.len();
    let mut before = vec![0.0; n];
    for pol in Polarization::BOTH {
        for (i, j) in grid.j_values().enumerate() {
            before[i] += pump.intensity(pol, j);
        }
    }
    let mut after = before.clone();
    for m in &exp.modes {
        let t = pump_transmission(&pump, m, &exp.int, exp.variant)?.total();
        for i in 0..n {
            after[i] += t[i] - before[i];
        }
    }
    // Offsets from ω₀ keep the small shift clear of the large carrier.
    let centroid = |v: &[f64]| {
        let (mut num, mut den) = (0.0, 0.0);
        for (i, j) in grid.j_values().enumerate() {
            num += j as f64 * grid.spacing() * v[i];
            den += v[i];
        }
        num / den
    };
    let (c0, c1) = (centroid(&before), centroid(&after));
    Ok(RedShift {
        centroid_thz: angular_to_thz(grid.center() + c0),
        transmitted_centroid_thz: angular_to_thz(grid.center() + c1),
        shift_thz: angular_to_thz(c1 - c0),
    })
}
