use std::f64::consts::TAU;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::{PipelineError, Result, Spectrogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Rect,
    Hann,
}

impl Window {
    pub fn name(self) -> &'static str {
        match self {
            Window::Rect => "rect",
            Window::Hann => "hann",
        }
    }

    pub fn weights(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rect => vec![1.0; n],
            Window::Hann if n < 2 => vec![1.0; n],
            Window::Hann => (0..n).map(|i| 0.5 - 0.5 * (TAU * i as f64 / (n - 1) as f64).cos()).collect(),
        }
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rect" => Ok(Window::Rect),
            "hann" => Ok(Window::Hann),
            other => Err(format!("unknown window `{other}` (expected rect or hann)")),
        }
    }
}

/// Single-sided amplitude spectrum along the delay axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySpectrum {
    pub window: Window,
    /// Modulation frequencies `k/(N·dt)` in THz, `k = 0..=N/2`.
    pub freqs_thz: Vec<f64>,
    pub probe_freqs_thz: Vec<f64>,
    /// Row-major: one row of probe bins per modulation frequency.
    pub amplitude: Vec<f64>,
    /// Bin-summed amplitude per modulation frequency.
    pub summed: Vec<f64>,
    pub resolution_thz: f64,
    pub warnings: Vec<String>,
}

/// A spectral maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub freq_thz: f64,
    pub amplitude: f64,
}

impl DelaySpectrum {
    pub fn amplitude_at(&self, freq: usize, bin: usize) -> f64 {
        self.amplitude[freq * self.probe_freqs_thz.len() + bin]
    }

    /// Index of the modulation frequency closest to `f_thz`.
    pub fn nearest(&self, f_thz: f64) -> usize {
        let k = (f_thz / self.resolution_thz).round();
        k.clamp(0.0, (self.freqs_thz.len() - 1) as f64) as usize
    }

    /// Largest summed amplitude within one bin of the frequency closest to `f_thz`.
    pub fn peak_near(&self, f_thz: f64) -> Peak {
        let c = self.nearest(f_thz);
        let lo = c.saturating_sub(1);
        let hi = (c + 1).min(self.summed.len() - 1);
        let index = (lo..=hi).fold(c, |b, i| if self.summed[i] > self.summed[b] { i } else { b });
        Peak { index, freq_thz: self.freqs_thz[index], amplitude: self.summed[index] }
    }

    /// Strict local maxima of the summed spectrum above `floor`, DC excluded.
    pub fn local_peaks(&self, floor: f64) -> Vec<Peak> {
        let s = &self.summed;
        (1..s.len())
            .filter(|&i| s[i] > floor && s[i] > s[i - 1] && (i + 1 == s.len() || s[i] > s[i + 1]))
            .map(|i| Peak { index: i, freq_thz: self.freqs_thz[i], amplitude: s[i] })
            .collect()
    }
}

fn positive_rows(spec: &Spectrogram) -> Vec<usize> {
    (0..spec.n_delays()).filter(|&i| spec.delays_fs()[i] > 0.0).collect()
}

fn mean_step(spec: &Spectrogram, rows: &[usize]) -> f64 {
    let d = spec.delays_fs();
    (d[rows[rows.len() - 1]] - d[rows[0]]) / (rows.len() - 1) as f64
}

/// Fourier transform of the positive-delay rows of each probe bin.
///
/// With `slowest_thz` set, a window holding fewer than two periods of that
/// frequency adds a resolution warning.
pub fn delay_fourier(spec: &Spectrogram, window: Window, slowest_thz: Option<f64>) -> Result<DelaySpectrum> {
    let rows = positive_rows(spec);
    if rows.len() < 2 {
        return Err(PipelineError::invalid("delay window", "need at least two positive delays"));
    }
    let n = rows.len();
    let dt = mean_step(spec, &rows);
    let d = spec.delays_fs();
    if rows.windows(2).any(|w| ((d[w[1]] - d[w[0]]) / dt - 1.0).abs() > 1e-6) {
        return Err(PipelineError::invalid("delay axis", "positive delays are not uniformly spaced"));
    }
    let span_ps = n as f64 * dt * 1e-3;
    let resolution = 1.0 / span_ps;
    let mut warnings = Vec::new();
    if let Some(f) = slowest_thz {
        if span_ps * f < 2.0 {
            warnings.push(format!(
                "positive-delay window of {:.3} ps holds {:.2} periods of the slowest mode ({f} THz); at least 2 are needed",
                span_ps,
                span_ps * f
            ));
        }
    }
    let w = window.weights(n);
    let wsum: f64 = w.iter().sum();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let nf = n / 2 + 1;
    let nb = spec.n_bins();
    let mut amplitude = vec![0.0; nf * nb];
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for b in 0..nb {
        for (k, &r) in rows.iter().enumerate() {
            buf[k] = C64::new(spec.get(r, b) * w[k], 0.0);
        }
        fft.process(&mut buf);
        for k in 0..nf {
            let scale = if k == 0 || 2 * k == n { 1.0 } else { 2.0 };
            amplitude[k * nb + b] = scale * buf[k].norm() / wsum;
        }
    }
    let summed = (0..nf).map(|k| amplitude[k * nb..(k + 1) * nb].iter().sum()).collect();
    Ok(DelaySpectrum {
        window,
        freqs_thz: (0..nf).map(|k| k as f64 * resolution).collect(),
        probe_freqs_thz: spec.freqs_thz().to_vec(),
        amplitude,
        summed,
        resolution_thz: resolution,
        warnings,
    })
}

/// Windowed transform of a trace at one exact frequency.
fn exact_dft(times_fs: &[f64], trace: &[f64], w: &[f64], f_thz: f64) -> C64 {
    times_fs
        .iter()
        .zip(trace)
        .zip(w)
        .map(|((t, r), wk)| C64::from_polar(r * wk, -TAU * f_thz * t * 1e-3))
        .sum()
}

/// Oscillation phase difference `arg Z_a − arg Z_b` (degrees, in (−180, 180])
/// of the two channels at `mode_thz`, taken on each channel's projection.
///
/// `None` when either channel's amplitude at the mode is below 1% of its
/// strongest spectral line.
pub fn quadrature_phase(a: &Spectrogram, b: &Spectrogram, mode_thz: f64, window: Window) -> Result<Option<f64>> {
    let mut z = Vec::with_capacity(2);
    for s in [a, b] {
        let rows = positive_rows(s);
        if rows.len() < 2 {
            return Err(PipelineError::invalid("delay window", "need at least two positive delays"));
        }
        let proj = s.projection();
        let trace: Vec<f64> = rows.iter().map(|&i| proj[i]).collect();
        let times: Vec<f64> = rows.iter().map(|&i| s.delays_fs()[i]).collect();
        let w = window.weights(rows.len());
        let zm = exact_dft(&times, &trace, &w, mode_thz);
        let span = rows.len() as f64 * mean_step(s, &rows) * 1e-3;
        let strongest = (1..=rows.len() / 2)
            .map(|k| exact_dft(&times, &trace, &w, k as f64 / span).norm())
            .fold(zm.norm(), f64::max);
        if zm.norm() == 0.0 || zm.norm() < 0.01 * strongest {
            return Ok(None);
        }
        z.push(zm);
    }
    let mut d = (z[0].arg() - z[1].arg()).to_degrees();
    while d <= -180.0 {
        d += 360.0;
    }
    while d > 180.0 {
        d -= 360.0;
    }
    // Rounding can land an exact half turn on −180.
    if (d + 180.0).abs() < 1e-9 {
        d = 180.0;
    }
    Ok(Some(d))
}
