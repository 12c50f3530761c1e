//! The eight acceptance criteria. Each prints one PASS/FAIL line; the process
//! fails if any criterion does.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use isrs_cli::RunConfig;
use isrs_model::{PhononMode, SymmetryClass};
use isrs_oracle::{
    build_total_hamiltonian, convergence_study, expect, initial_state, HamiltonianTerms, Method, Observable, OracleObservable,
    OracleSystem, PhononInit, Propagator, Ref1Mode, StudyStatus,
};
use isrs_perturb::Channel;
use isrs_pipeline::{
    delay_fourier, fit_polar, polar_scan, pump_red_shift, quadrature_phase, run_pump_probe, DelayAxis, Experiment, PolarModel,
    Spectrogram, Window,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

fn quartz_at(theta_deg: f64) -> Experiment {
    Experiment::quartz().with_theta(theta_deg.to_radians())
}

fn within(t: Duration, limit: f64, msg: String) -> Check {
    let s = t.as_secs_f64();
    ensure(s < limit, format!("{msg}; {s:.1} s (limit {limit} s)"))
}

fn oracle_convergence() -> Check {
    let start = Instant::now();
    let config = RunConfig::default();
    let o = &config.oracle;
    if (o.bins, o.photon_cutoff, o.phonon_cutoff) != (3, 2, 4) || o.coupling_scales != [1e-3, 5e-4, 2.5e-4] {
        return Err(format!("preset oracle settings changed: {o:?}"));
    }
    let mut worst: f64 = 0.0;
    for (label, setup) in config.oracle_setups().map_err(|e| e.to_string())? {
        let r = convergence_study(&setup, &[OracleObservable::MomentumKick, OracleObservable::IntensityFirstOrder])
            .map_err(|e| e.to_string())?;
        for e in &r.entries {
            let x = e.exponent.ok_or_else(|| format!("{label} {}: no exponent ({})", e.observable.name(), e.status.name()))?;
            if e.status != StudyStatus::Converged || (x - 2.0).abs() > 0.2 {
                return Err(format!("{label} {}: {} exponent {x:.3}", e.observable.name(), e.status.name()));
            }
            worst = worst.max((x - 2.0).abs());
        }
    }
    within(start.elapsed(), 60.0, format!("kick and first-order intensity exponents within {worst:.2e} of 2 for every mode"))
}

fn conservation() -> Check {
    let config = RunConfig::default();
    let mut drift: f64 = 0.0;
    for (_, setup) in config.oracle_setups().map_err(|e| e.to_string())? {
        let scale = setup.scales[0];
        let coupling = setup.coupling_for(scale).map_err(|e| e.to_string())?;
        let mode = PhononMode::new(setup.omega, setup.mass, setup.class, coupling, f64::INFINITY).map_err(|e| e.to_string())?;
        let sys = OracleSystem::new(setup.grid, &setup.config, mode, setup.int, setup.chi0, setup.variant).map_err(|e| e.to_string())?;
        let ref1 = if setup.class == SymmetryClass::EL { Ref1Mode::Operator } else { Ref1Mode::MeanField(0.3) };
        let h = build_total_hamiltonian(&sys, &HamiltonianTerms::full(ref1)).map_err(|e| e.to_string())?;
        let (rho, _) = initial_state(&sys, &setup.pulse, &PhononInit::Vacuum).map_err(|e| e.to_string())?;
        let n0 = expect(&sys, &rho, &Observable::TotalPhotonNumber).map_err(|e| e.to_string())?;
        for steps in [1.0, 3.0, 10.0] {
            let u = Propagator::new(&h, steps * setup.int.tau, Method::Pade).map_err(|e| e.to_string())?;
            let out = rho.evolve(&u).map_err(|e| e.to_string())?;
            let n = expect(&sys, &out, &Observable::TotalPhotonNumber).map_err(|e| e.to_string())?;
            drift = drift.max((n - n0).abs());
        }
    }
    if drift >= 1e-10 {
        return Err(format!("photon number drift {drift:.2e}"));
    }
    let mut exp = quartz_at(22.5);
    exp.delays = DelayAxis::new(0.0, 299.0 * 6.7, 6.7).map_err(|e| e.to_string())?;
    if exp.delays.len() != 300 {
        return Err(format!("sweep has {} points", exp.delays.len()));
    }
    let r = run_pump_probe(&exp).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for i in 0..r.x_isrs.n_delays() {
        let row = r.x_isrs.row(i);
        let l1: f64 = row.iter().map(|v| v.abs()).sum();
        if l1 > 0.0 {
            worst = worst.max(row.iter().sum::<f64>().abs() / l1);
        }
    }
    ensure(worst < 1e-12, format!("photon drift {drift:.2e}; ISRS bin-sum residual {worst:.2e} over 300 delays"))
}

fn spectral_structure() -> Check {
    let start = Instant::now();
    let r = run_pump_probe(&quartz_at(0.0)).map_err(|e| e.to_string())?;
    let f = delay_fourier(&r.x, Window::Hann, Some(4.05)).map_err(|e| e.to_string())?;
    if f.resolution_thz > 0.5 {
        return Err(format!("FFT bin {} THz is wider than 0.5 THz", f.resolution_thz));
    }
    let peaks = f.local_peaks(1e-3 * max_abs(&f.summed[1..]));
    let mut found = Vec::new();
    for target in [4.05, 6.0, 13.95] {
        let p = peaks
            .iter()
            .filter(|p| (p.freq_thz - target).abs() <= f.resolution_thz)
            .max_by(|a, b| a.amplitude.total_cmp(&b.amplitude))
            .ok_or_else(|| format!("no x' peak within one bin of {target} THz"))?;
        found.push(format!("{:.3}", p.freq_thz));
    }
    let r45 = run_pump_probe(&quartz_at(45.0)).map_err(|e| e.to_string())?;
    let g = delay_fourier(&r45.y, Window::Hann, Some(4.05)).map_err(|e| e.to_string())?;
    let e = g.peak_near(4.05);
    if (e.freq_thz - 4.05).abs() > g.resolution_thz || e.amplitude <= 0.0 {
        return Err(format!("y' E peak at {} THz", e.freq_thz));
    }
    let other = g
        .local_peaks(0.0)
        .iter()
        .filter(|p| p.index != e.index)
        .map(|p| p.amplitude)
        .chain([6.0, 13.95].map(|t| g.peak_near(t).amplitude))
        .fold(0.0f64, f64::max);
    let ratio = other / e.amplitude;
    if ratio >= 0.01 {
        return Err(format!("y' at 45 deg: strongest other line is {:.2}% of the E peak", 100.0 * ratio));
    }
    within(start.elapsed(), 30.0, format!("x' peaks at {} THz; y' other lines {:.2}% of E", found.join("/"), 100.0 * ratio))
}

fn quadrature() -> Check {
    let phase = |x: &Spectrogram, y: &Spectrogram| -> Result<f64, String> {
        let d = quadrature_phase(x, y, 4.05, Window::Hann).map_err(|e| e.to_string())?.ok_or("a channel carries no E line")?;
        ensure((d.abs() - 90.0).abs() <= 2.0, format!("{d:.2}")).map(|_| d).map_err(|m| format!("phase difference {m} deg"))
    };
    // One tilted pump drives both channels; the two figure geometries are
    // the parallel channel at 0 deg and the crossed one at 45 deg.
    let mixed = run_pump_probe(&quartz_at(22.5)).map_err(|e| e.to_string())?;
    let par = run_pump_probe(&quartz_at(0.0)).map_err(|e| e.to_string())?;
    let cross = run_pump_probe(&quartz_at(45.0)).map_err(|e| e.to_string())?;
    let d1 = phase(&mixed.x, &mixed.y)?;
    let d2 = phase(&par.x, &cross.y)?;
    let scale = max_abs(par.x.data());
    let n = par.x.n_bins();
    let mut asym: f64 = 0.0;
    for i in 0..par.x.n_delays() {
        let row = par.x.row(i);
        for k in 0..n {
            asym = asym.max((row[k] + row[n - 1 - k]).abs() / scale);
        }
    }
    if asym >= 1e-10 {
        return Err(format!("x' antisymmetry residual {asym:.2e}"));
    }
    for i in 0..cross.y.n_delays() {
        let row = cross.y.row(i);
        if !(row.iter().all(|v| *v >= 0.0) || row.iter().all(|v| *v <= 0.0)) {
            return Err(format!("y' changes sign across bins at delay {} fs", cross.y.delays_fs()[i]));
        }
    }
    Ok(format!("phase {d1:.2} deg (22.5 deg pump), {d2:.2} deg (0/45 deg pumps); x' antisymmetry {asym:.1e}; y' single-signed"))
}

fn polar_laws() -> Check {
    let exp = Experiment::quartz();
    let thetas: Vec<f64> = (0..13).map(|k| 15.0 * k as f64).collect();
    let mut notes = Vec::new();
    for (idx, channel, zero) in [(2, Channel::X, None), (0, Channel::X, Some(45.0)), (1, Channel::Y, Some(0.0))] {
        let scan = polar_scan(&exp, &thetas, idx, channel, Window::Hann).map_err(|e| e.to_string())?;
        let fit = fit_polar(&scan, PolarModel::for_class(scan.class)).map_err(|e| e.to_string())?;
        let r2 = fit.r_squared.ok_or_else(|| format!("{} scan is empty", scan.class))?;
        if r2 <= 0.999 {
            return Err(format!("{} {}: R2 {r2:.6}", scan.class, fit.model.name()));
        }
        if let Some(z) = zero {
            if !fit.zero_crossings_deg.iter().any(|t| (t - z).abs() <= 15.0) {
                return Err(format!("{}: zero crossings {:?}, expected {z}", scan.class, fit.zero_crossings_deg));
            }
        }
        notes.push(format!("{} {} R2 {r2:.6}", scan.class, fit.model.name()));
    }
    Ok(notes.join("; "))
}

fn red_shift() -> Check {
    let e = Experiment::quartz();
    let s1 = pump_red_shift(&e).map_err(|e| e.to_string())?.shift_thz;
    let mut e2 = e.clone();
    e2.pump.alpha0 *= 2f64.sqrt();
    let s2 = pump_red_shift(&e2).map_err(|e| e.to_string())?.shift_thz;
    let ratio = s2 / s1;
    ensure(s1 < 0.0 && s2 < 0.0 && (ratio - 2.0).abs() <= 1e-3, format!("shift {s1:.4e} THz; doubled intensity ratio {ratio:.6}"))
}

fn degenerate_switches() -> Check {
    let mut e = quartz_at(30.0);
    e.chi0.phi = 0.0;
    let r = run_pump_probe(&e).map_err(|e| e.to_string())?;
    if r.y.data().iter().any(|v| *v != 0.0) {
        return Err("phi = 0 leaves a y' signal".into());
    }
    let base = quartz_at(30.0);
    let zero = base.modes.iter().map(|m| PhononMode { coupling: 0.0, ..*m }).collect();
    let r = run_pump_probe(&base.with_modes(zero)).map_err(|e| e.to_string())?;
    if [&r.x, &r.y, &r.x_isrs].iter().any(|s| s.data().iter().any(|v| *v != 0.0)) {
        return Err("zero couplings leave a signal".into());
    }
    let r = run_pump_probe(&base).map_err(|e| e.to_string())?;
    let mut rows = 0;
    for s in [&r.x, &r.y] {
        for (i, t) in s.delays_fs().iter().enumerate() {
            if *t < 0.0 {
                rows += 1;
                if s.row(i).iter().any(|v| *v != 0.0) {
                    return Err(format!("row at {t} fs is nonzero"));
                }
            }
        }
    }
    ensure(rows > 0, format!("phi = 0, zero couplings and {rows} negative-delay rows all exactly zero"))
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for t in ["1", "4", "8"] {
        let dir = tmp.path().join(format!("t{t}"));
        let status = Command::new(env!("CARGO_BIN_EXE_isrs"))
            .args(["simulate", "--threads", t, "--out-dir"])
            .arg(&dir)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        if !status.success() {
            return Err(format!("simulate --threads {t} exited with {status}"));
        }
        runs.push(snapshot(&dir)?);
    }
    let files = runs[0].len();
    ensure(runs[1] == runs[0] && runs[2] == runs[0], format!("{files} files byte-identical at 1, 4 and 8 threads"))
}

fn snapshot(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut v = Vec::new();
    for e in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let e = e.map_err(|e| e.to_string())?;
        v.push((e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).map_err(|e| e.to_string())?));
    }
    v.sort();
    Ok(v)
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle-analytic convergence", oracle_convergence),
        ("conservation", conservation),
        ("quartz spectral structure", spectral_structure),
        ("quadrature", quadrature),
        ("polar laws", polar_laws),
        ("pump red-shift", red_shift),
        ("degenerate switches", degenerate_switches),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("PASS {} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} acceptance criteria failed", criteria.len());
        std::process::exit(1);
    }
}
