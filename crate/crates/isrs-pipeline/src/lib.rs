//! The numerical pump-probe experiment: delay sweeps of the analytic probe
//! response, Fourier analysis along the delay axis, polarization scans and
//! their symmetry fits.
//!
//! Delays are in fs and user-facing frequencies in THz; everything handed to
//! the model crates is angular (rad/ps).

mod error;
mod experiment;
mod fourier;
mod par;
mod polar;
mod shift;
mod spectrogram;

pub use error::PipelineError;
pub use experiment::{snap_frequency, DelayAxis, Experiment, PulseSpec};
pub use fourier::{delay_fourier, quadrature_phase, DelaySpectrum, Peak, Window};
pub use par::Execution;
pub use polar::{fit_polar, polar_scan, polar_scan_with, FitResult, PolarModel, PolarScan};
pub use shift::{pump_red_shift, RedShift};
pub use spectrogram::{display_delays, run_pump_probe, run_pump_probe_with, PumpProbe, Spectrogram};

pub type Result<T> = std::result::Result<T, PipelineError>;
