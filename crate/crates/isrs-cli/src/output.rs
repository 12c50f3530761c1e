use std::path::Path;

use isrs_perturb::Channel;
use isrs_pipeline::{DelaySpectrum, Spectrogram};
use serde_json::Value;

use crate::CliError;

/// Shortest decimal that parses back to the same `f64`; zero is `0`.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{v:?}");
    match s.strip_suffix(".0") {
        Some(t) => t.to_string(),
        None => s,
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("ascii output")
}

/// Rows `(header, cells)` as CSV text.
pub fn csv_table<const N: usize>(header: [&str; N], rows: impl IntoIterator<Item = [f64; N]>) -> String {
    let mut w = csv_writer();
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r.map(fmt_float)).expect("in-memory write");
    }
    finish(w)
}

/// `delay_fs,freq_thz,delta_I`, delay-major.
pub fn spectrogram_csv(s: &Spectrogram) -> String {
    let rows = s.delays_fs().iter().enumerate().flat_map(|(i, t)| {
        s.freqs_thz().iter().enumerate().map(move |(b, f)| [*t, *f, s.get(i, b)])
    });
    csv_table(["delay_fs", "freq_thz", "delta_I"], rows)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_spectrogram_csv(s: &Spectrogram, path: &Path) -> Result<(), CliError> {
    write_file(path, &spectrogram_csv(s))
}

/// Parses the output of [`spectrogram_csv`].
pub fn parse_spectrogram_csv(text: &str, channel: Channel, path: &Path) -> Result<Spectrogram, CliError> {
    let bad = |r: String| CliError::format(path, r);
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["delay_fs", "freq_thz", "delta_I"] {
        return Err(bad("expected header delay_fs,freq_thz,delta_I".into()));
    }
    let mut delays: Vec<f64> = Vec::new();
    let mut freqs: Vec<f64> = Vec::new();
    let mut data = Vec::new();
    let mut col = 0;
    for (n, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let line = n + 2;
        let field = |k: usize| -> Result<f64, CliError> {
            rec.get(k).and_then(|v| v.parse().ok()).ok_or_else(|| bad(format!("line {line}: bad number in column {}", k + 1)))
        };
        let (t, f, v) = (field(0)?, field(1)?, field(2)?);
        if delays.last() != Some(&t) {
            if !delays.is_empty() && col != freqs.len() {
                return Err(bad(format!("line {line}: delay row is incomplete")));
            }
            delays.push(t);
            col = 0;
        }
        if delays.len() == 1 {
            freqs.push(f);
        } else if freqs.get(col) != Some(&f) {
            return Err(bad(format!("line {line}: frequency {f} out of order")));
        }
        col += 1;
        data.push(v);
    }
    if delays.is_empty() || col != freqs.len() {
        return Err(bad("empty or ragged spectrogram".into()));
    }
    Ok(Spectrogram::new(channel, delays, freqs, data)?)
}

/// `fft_freq_thz,freq_thz,amplitude`, modulation-frequency-major.
pub fn spectrum_csv(d: &DelaySpectrum) -> String {
    let nb = d.probe_freqs_thz.len();
    let rows = d.freqs_thz.iter().enumerate().flat_map(|(k, f)| {
        d.probe_freqs_thz.iter().enumerate().map(move |(b, p)| [*f, *p, d.amplitude[k * nb + b]])
    });
    csv_table(["fft_freq_thz", "freq_thz", "amplitude"], rows)
}

/// `fft_freq_thz,amplitude` of the bin-summed spectrum.
pub fn summed_spectrum_csv(d: &DelaySpectrum) -> String {
    csv_table(["fft_freq_thz", "amplitude"], d.freqs_thz.iter().zip(&d.summed).map(|(f, a)| [*f, *a]))
}

/// JSON with sorted keys, two-space indent and every float written with 17
/// significant digits. Non-finite floats become `null`.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    emit(v, 0, &mut out);
    out.push('\n');
    out
}

fn emit(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize, out: &mut String| out.push_str(&"  ".repeat(d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) if n.is_f64() => match n.as_f64() {
            Some(x) if x.is_finite() => out.push_str(&format!("{x:.16e}")),
            _ => out.push_str("null"),
        },
        Value::Number(n) => out.push_str(&n.to_string()),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                pad(depth + 1, out);
                emit(x, depth + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(depth + 1, out);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                emit(&m[*k], depth + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push('}');
        }
    }
}

/// A float that serializes as `null` when it is not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
