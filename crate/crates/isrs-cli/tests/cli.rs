use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use isrs_cli::output::parse_spectrogram_csv;
use isrs_cli::RunConfig;
use isrs_perturb::Channel;
use isrs_pipeline::{delay_fourier, Window};

fn isrs(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isrs")).current_dir(dir).args(args).output().expect("binary runs")
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn presets_feed_back_into_simulate() {
    let tmp = tempfile::tempdir().unwrap();
    let out = isrs(tmp.path(), &["presets"]);
    assert_eq!(out.status.code(), Some(0));
    fs::write(tmp.path().join("q.toml"), &out.stdout).unwrap();
    let parsed = RunConfig::parse(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(parsed.config, RunConfig::default());
    let run = isrs(tmp.path(), &["simulate", "--config", "q.toml", "--out-dir", "sim"]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    for f in ["config.toml", "spectrogram_x.csv", "spectrogram_y.csv", "fft_x.csv", "fft_y_summed.csv", "summary.json", "run.log"] {
        assert!(tmp.path().join("sim").join(f).is_file(), "{f}");
    }
    let echo = fs::read_to_string(tmp.path().join("sim/config.toml")).unwrap();
    assert_eq!(echo.as_bytes(), &out.stdout[..]);
}

#[test]
fn analyze_reproduces_in_process_fft() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(isrs(d, &["simulate", "--out-dir", "sim", "--window", "hann"]).status.code(), Some(0));
    let run = isrs(d, &["analyze", "--out-dir", "an", "--window", "hann", "sim/spectrogram_x.csv", "sim/spectrogram_y.csv"]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    for f in ["fft_x.csv", "fft_x_summed.csv", "fft_y.csv", "fft_y_summed.csv"] {
        assert_eq!(fs::read(d.join("sim").join(f)).unwrap(), fs::read(d.join("an").join(f)).unwrap(), "{f}");
    }
    let exp = RunConfig::default().experiment().unwrap();
    let r = isrs_pipeline::run_pump_probe(&exp).unwrap();
    let direct = delay_fourier(&r.x, Window::Hann, None).unwrap();
    let text = fs::read_to_string(d.join("sim/spectrogram_x.csv")).unwrap();
    let parsed = parse_spectrogram_csv(&text, Channel::X, Path::new("x.csv")).unwrap();
    assert_eq!(parsed, r.x);
    let back = delay_fourier(&parsed, Window::Hann, None).unwrap();
    let scale = direct.amplitude.iter().fold(0.0f64, |a, b| a.max(*b));
    for (a, b) in direct.amplitude.iter().zip(&back.amplitude) {
        assert!((a - b).abs() <= 1e-12 * scale);
    }
    let summed: Vec<f64> = fs::read_to_string(d.join("an/fft_x_summed.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for (a, b) in direct.summed.iter().zip(&summed) {
        assert!((a - b).abs() <= 1e-12 * scale);
    }
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let mut runs = Vec::new();
    for t in ["1", "4", "8"] {
        let dir = format!("t{t}");
        let out = isrs(d, &["simulate", "--threads", t, "--out-dir", &dir]);
        assert_eq!(out.status.code(), Some(0));
        let out = isrs(d, &["polar-scan", "--threads", t, "--out-dir", &dir]);
        assert_eq!(out.status.code(), Some(0));
        runs.push(read_dir_sorted(&d.join(dir)));
    }
    assert!(runs[0].len() >= 10);
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn oracle_check_on_the_preset_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = isrs(tmp.path(), &["oracle-check", "--out-dir", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = fs::read_to_string(tmp.path().join("o/oracle_report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["studies"].as_array().unwrap().len(), 4);
    let again = isrs(tmp.path(), &["oracle-check", "--out-dir", "o2", "--threads", "3"]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(text, fs::read_to_string(tmp.path().join("o2/oracle_report.json")).unwrap());
}

#[test]
fn oracle_failure_exits_three() {
    // A comparison window far too coarse for the truncated Fock space makes
    // the residuals stop scaling.
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), "[oracle]\ncoupling_scales = [0.8, 0.4, 0.2]\n").unwrap();
    let out = isrs(tmp.path(), &["oracle-check", "--config", "c.toml", "--out-dir", "o"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(isrs(d, &["frobnicate"]).status.code(), Some(1));
    assert_eq!(isrs(d, &["simulate", "--window", "kaiser"]).status.code(), Some(1));
    assert_eq!(isrs(d, &["simulate", "--threads", "0"]).status.code(), Some(1));
    assert_eq!(isrs(d, &["analyze", "--channel", "x", "a.csv", "b.csv"]).status.code(), Some(1));
    assert_eq!(isrs(d, &["--help"]).status.code(), Some(0));
    fs::write(d.join("bad.toml"), "[probe]\nsigma_thz = -1.0\n").unwrap();
    let out = isrs(d, &["simulate", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("probe.sigma_thz") && err.contains("line 2"), "{err}");
    assert_eq!(isrs(d, &["simulate", "--config", "missing.toml"]).status.code(), Some(2));
}

#[test]
fn variant_flag_and_snapping_reach_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("c.toml"), "[[modes]]\nclass = \"A\"\nfreq_thz = 6.03\ncoupling = 1e-5\n").unwrap();
    let out = isrs(d, &["simulate", "--config", "c.toml", "--variant", "main-text", "--channel", "x", "--out-dir", "s"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("snapped to 6 THz"));
    let echo = RunConfig::parse(&fs::read_to_string(d.join("s/config.toml")).unwrap()).unwrap().config;
    assert_eq!(echo.interaction.weight_variant, "main-text");
    assert_eq!(echo.modes[0].freq_thz, 6.0);
    assert!(!d.join("s/spectrogram_y.csv").exists());
    assert!(fs::read_to_string(d.join("s/run.log")).unwrap().contains("snapped"));
}
