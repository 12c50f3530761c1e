use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use isrs_oracle::{convergence_study, OracleReport};
use isrs_perturb::{Channel, WeightVariant};
use isrs_pipeline::{
    delay_fourier, display_delays, fit_polar, polar_scan, pump_red_shift, quadrature_phase, run_pump_probe, DelaySpectrum,
    PolarModel, Spectrogram, Window,
};
use serde_json::{json, Map, Value};

use crate::output::{canonical_json, num, parse_spectrogram_csv, spectrum_csv, summed_spectrum_csv, write_file, write_spectrogram_csv};
use crate::{load_config, CliError, LoadedConfig, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ACCEPTANCE: i32 = 3;

const DEFAULT_OUT: &str = "isrs-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChannelArg {
    X,
    Y,
    Both,
}

impl ChannelArg {
    fn channels(self) -> &'static [Channel] {
        match self {
            ChannelArg::X => &[Channel::X],
            ChannelArg::Y => &[Channel::Y],
            ChannelArg::Both => &[Channel::X, Channel::Y],
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "isrs", version, about = "Pump-probe simulation of impulsive Raman phonon signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; the quartz preset when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "both")]
    channel: ChannelArg,
    /// Delay-axis window: rect or hann.
    #[arg(long, global = true, default_value = "rect")]
    window: Window,
    /// Overrides interaction.weight_variant: main-text or sm.
    #[arg(long, global = true)]
    variant: Option<WeightVariant>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Delay sweep: spectrogram and FFT CSVs, summary JSON and a run log.
    Simulate,
    /// Exact-propagation convergence check; exits 3 when an exponent is out of bounds.
    OracleCheck,
    /// Pump-polarization scan with symmetry-law fits.
    PolarScan,
    /// FFT and quadrature of spectrogram CSVs (x then y for `--channel both`).
    Analyze {
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<PathBuf>,
    },
    /// Prints the quartz preset config.
    Presets,
}

/// Parses `argv`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match with_threads(cli.threads, || dispatch(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

#[cfg(feature = "parallel")]
fn with_threads(threads: Option<u16>, f: impl FnOnce() -> Result<i32, CliError> + Send) -> Result<i32, CliError> {
    match threads {
        None => f(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => pool.install(f),
            Err(e) => {
                eprintln!("error: cannot start {n} threads: {e}");
                Ok(EXIT_USAGE)
            }
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads(_threads: Option<u16>, f: impl FnOnce() -> Result<i32, CliError> + Send) -> Result<i32, CliError> {
    f()
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let mut loaded = match &cli.config {
        Some(p) => load_config(p)?,
        None => LoadedConfig { config: RunConfig::default(), warnings: Vec::new() },
    };
    if let Some(v) = cli.variant {
        loaded.config.interaction.weight_variant = v.name().into();
    }
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    let out_dir = || -> Result<PathBuf, CliError> {
        let d = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        std::fs::create_dir_all(&d).map_err(|e| CliError::io(&d, e))?;
        Ok(d)
    };
    match &cli.command {
        Command::Presets => {
            let text = RunConfig::default().to_toml();
            match &cli.out_dir {
                Some(_) => {
                    let p = out_dir()?.join("quartz.toml");
                    write_file(&p, &text)?;
                    println!("{}", p.display());
                }
                None => print!("{text}"),
            }
            Ok(EXIT_OK)
        }
        Command::Simulate => simulate(&loaded, cli, &out_dir()?),
        Command::OracleCheck => {
            let dir = out_dir()?;
            let passed = oracle_check(&loaded.config, &dir)?;
            Ok(if passed { EXIT_OK } else { EXIT_ACCEPTANCE })
        }
        Command::PolarScan => polar(&loaded.config, cli, &out_dir()?),
        Command::Analyze { inputs } => analyze(&loaded.config, cli, inputs, &out_dir()?),
    }
}

fn peaks_json(d: &DelaySpectrum) -> Value {
    let top = d.summed.iter().skip(1).fold(0.0f64, |a, b| a.max(*b));
    let peaks: Vec<Value> = d
        .local_peaks(0.01 * top)
        .into_iter()
        .map(|p| json!({"freq_thz": num(p.freq_thz), "amplitude": num(p.amplitude)}))
        .collect();
    json!({
        "window": d.window.name(),
        "resolution_thz": num(d.resolution_thz),
        "peaks": peaks,
        "warnings": d.warnings,
    })
}

/// Writes `fft_<ch>.csv` and `fft_<ch>_summed.csv`; returns the file names
/// and the peak summary.
fn write_spectrum(
    spec: &Spectrogram,
    window: Window,
    slowest_thz: Option<f64>,
    dir: &Path,
) -> Result<(Vec<String>, Value), CliError> {
    let d = delay_fourier(spec, window, slowest_thz)?;
    let ch = tag(spec.channel());
    let a = format!("fft_{ch}.csv");
    let b = format!("fft_{ch}_summed.csv");
    write_file(&dir.join(&a), &spectrum_csv(&d))?;
    write_file(&dir.join(&b), &summed_spectrum_csv(&d))?;
    Ok((vec![a, b], peaks_json(&d)))
}

fn mode_freqs(config: &RunConfig) -> Vec<f64> {
    let mut f: Vec<f64> = config.modes.iter().map(|m| m.freq_thz).collect();
    f.sort_by(f64::total_cmp);
    f.dedup();
    f
}

fn quadrature_json(x: &Spectrogram, y: &Spectrogram, config: &RunConfig, window: Window) -> Result<Value, CliError> {
    let mut out = Vec::new();
    for f in mode_freqs(config) {
        let phase = quadrature_phase(x, y, f, window)?;
        out.push(json!({"mode_thz": num(f), "phase_deg": phase.map_or(Value::Null, num)}));
    }
    Ok(Value::Array(out))
}

fn simulate(loaded: &LoadedConfig, cli: &Cli, dir: &Path) -> Result<i32, CliError> {
    let config = &loaded.config;
    let exp = config.experiment()?;
    let r = run_pump_probe(&exp)?;
    let slowest = mode_freqs(config).first().copied();
    let mut log = vec![
        "isrs simulate".to_string(),
        format!("window {}", cli.window.name()),
        format!("variant {}", config.interaction.weight_variant),
        format!("fluence tag {}", config.pump.fluence_tag),
        format!("delays {} ({} positive)", exp.delays.len(), exp.delays.values().iter().filter(|t| **t > 0.0).count()),
    ];
    log.extend(loaded.warnings.iter().map(|w| format!("warning: {w}")));
    log.extend(r.warnings.iter().map(|w| format!("warning: {w}")));
    let mut files = vec!["config.toml".to_string()];
    write_file(&dir.join("config.toml"), &config.to_toml())?;
    let mut channels = Map::new();
    for ch in cli.channel.channels() {
        let s = match ch {
            Channel::X => &r.x,
            Channel::Y => &r.y,
        };
        let name = format!("spectrogram_{}.csv", tag(*ch));
        write_spectrogram_csv(s, &dir.join(&name))?;
        files.push(name);
        let (f, peaks) = write_spectrum(s, cli.window, slowest, dir)?;
        files.extend(f);
        channels.insert(tag(*ch).into(), peaks);
    }
    let shift = pump_red_shift(&exp)?;
    let display: Vec<Value> = mode_freqs(config)
        .into_iter()
        .filter_map(|f| {
            display_delays(&exp.delays.values(), isrs_model::thz_to_angular(f))
                .map(|(c, s)| json!({"mode_thz": num(f), "cos_delay_fs": num(c), "sin_delay_fs": num(s)}))
        })
        .collect();
    let mut summary = json!({
        "channels": channels,
        "red_shift": {
            "centroid_thz": num(shift.centroid_thz),
            "transmitted_centroid_thz": num(shift.transmitted_centroid_thz),
            "shift_thz": num(shift.shift_thz),
        },
        "display_delays": display,
        "max_abs_delta_i": {"x": num(max_abs(r.x.data())), "y": num(max_abs(r.y.data()))},
        "warnings": loaded.warnings.iter().chain(&r.warnings).collect::<Vec<_>>(),
    });
    if cli.channel == ChannelArg::Both {
        summary["quadrature"] = quadrature_json(&r.x, &r.y, config, cli.window)?;
    }
    write_file(&dir.join("summary.json"), &canonical_json(&summary))?;
    files.push("summary.json".into());
    let mut code = EXIT_OK;
    if config.oracle.enabled {
        let passed = oracle_check(config, dir)?;
        files.push("oracle_report.json".into());
        log.push(format!("oracle check {}", if passed { "passed" } else { "failed" }));
        if !passed {
            code = EXIT_ACCEPTANCE;
        }
    }
    files.push("run.log".into());
    log.extend(files.iter().map(|f| format!("wrote {f}")));
    write_file(&dir.join("run.log"), &(log.join("\n") + "\n"))?;
    println!("wrote {} files to {}", files.len(), dir.display());
    Ok(code)
}

/// File-name and JSON-key tag of a channel.
fn tag(ch: Channel) -> &'static str {
    match ch {
        Channel::X => "x",
        Channel::Y => "y",
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

fn report_json(label: &str, r: &OracleReport) -> Value {
    let observables: Vec<Value> = r
        .entries
        .iter()
        .map(|e| {
            let rows: Vec<Value> = e
                .rows
                .iter()
                .map(|w| {
                    json!({
                        "scale": num(w.scale),
                        "exact": num(w.exact),
                        "perturbative": num(w.perturbative),
                        "abs_error": num(w.abs_error),
                        "rel_error": num(w.rel_error),
                        "residual": num(w.residual),
                    })
                })
                .collect();
            json!({
                "name": e.observable.name(),
                "status": e.status.name(),
                "passed": e.status.passed(),
                "expected_exponent": num(e.expected_exponent),
                "exponent": e.exponent.map_or(Value::Null, num),
                "prefactor": e.prefactor.map_or(Value::Null, num),
                "rows": rows,
            })
        })
        .collect();
    json!({"mode": label, "observables": observables})
}

/// Runs every configured study, writes `oracle_report.json` and reports
/// whether all statuses passed.
pub fn oracle_check(config: &RunConfig, dir: &Path) -> Result<bool, CliError> {
    let obs = config.oracle_observables();
    let mut studies = Vec::new();
    let mut passed = true;
    for (label, setup) in config.oracle_setups()? {
        let r = convergence_study(&setup, &obs)?;
        for e in &r.entries {
            passed &= e.status.passed();
            let exp = e.exponent.map_or("-".to_string(), |x| format!("{x:.3}"));
            println!("{label}: {} {} (exponent {exp})", e.observable.name(), e.status.name());
        }
        studies.push(report_json(&label, &r));
    }
    let o = &config.oracle;
    let report = json!({
        "passed": passed,
        "settings": {
            "bins": o.bins,
            "photon_cutoff": o.photon_cutoff,
            "phonon_cutoff": o.phonon_cutoff,
            "coupling_scales": o.coupling_scales.iter().map(|s| num(*s)).collect::<Vec<_>>(),
            "weight_variant": config.interaction.weight_variant,
        },
        "studies": studies,
    });
    write_file(&dir.join("oracle_report.json"), &canonical_json(&report))?;
    Ok(passed)
}

fn polar(config: &RunConfig, cli: &Cli, dir: &Path) -> Result<i32, CliError> {
    let exp = config.experiment()?;
    let thetas = &config.sweep.theta_list_deg;
    let mut fits = Vec::new();
    for i in 0..exp.modes.len() {
        for ch in cli.channel.channels() {
            let scan = polar_scan(&exp, thetas, i, *ch, cli.window)?;
            let model = PolarModel::for_class(scan.class);
            let fit = fit_polar(&scan, model)?;
            let name = format!("polar_{i}_{}.csv", tag(*ch));
            let rows = scan.theta_deg.iter().zip(&scan.amplitude).map(|(t, a)| [*t, *a]);
            write_file(&dir.join(&name), &crate::output::csv_table(["theta_deg", "amplitude"], rows))?;
            println!(
                "mode {i} ({} {} THz) {}: {} R2 {}",
                scan.class,
                config.modes[i].freq_thz,
                tag(*ch),
                model.name(),
                fit.r_squared.map_or("-".into(), |r| format!("{r:.6}"))
            );
            fits.push(json!({
                "mode": i,
                "class": scan.class.name(),
                "target_thz": num(scan.target_thz),
                "channel": tag(*ch),
                "file": name,
                "model": model.name(),
                "amplitude": num(fit.amplitude),
                "residual": num(fit.residual),
                "r_squared": fit.r_squared.map_or(Value::Null, num),
                "zero_crossings_deg": fit.zero_crossings_deg.iter().map(|t| num(*t)).collect::<Vec<_>>(),
                "warnings": scan.warnings,
            }));
        }
    }
    write_file(&dir.join("polar_fit.json"), &canonical_json(&json!({"window": cli.window.name(), "fits": fits})))?;
    Ok(EXIT_OK)
}

fn analyze(config: &RunConfig, cli: &Cli, inputs: &[PathBuf], dir: &Path) -> Result<i32, CliError> {
    let channels = cli.channel.channels();
    if channels.len() != inputs.len() {
        eprintln!("error: --channel {:?} takes {} input file(s), got {}", cli.channel, channels.len(), inputs.len());
        return Ok(EXIT_USAGE);
    }
    let slowest = mode_freqs(config).first().copied();
    let mut specs = Vec::new();
    let mut out = Map::new();
    for (ch, path) in channels.iter().zip(inputs) {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let s = parse_spectrogram_csv(&text, *ch, path)?;
        let (_, peaks) = write_spectrum(&s, cli.window, slowest, dir)?;
        out.insert(tag(*ch).into(), peaks);
        specs.push(s);
    }
    let mut summary = json!({"channels": out});
    if let [x, y] = specs.as_slice() {
        summary["quadrature"] = quadrature_json(x, y, config, cli.window)?;
    }
    write_file(&dir.join("analysis.json"), &canonical_json(&summary))?;
    println!("wrote analysis to {}", dir.display());
    Ok(EXIT_OK)
}
