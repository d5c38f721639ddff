//! CSV and JSON artifacts of a run.
//!
//! The CSV has the header `tau,s,gamma,regime,valid`; numbers carry 12
//! significant digits in plain decimal (scientific notation outside
//! `1e-5 ..= 1e15`), `regime` is `zeno` or `anti_zeno`, `valid` is
//! `true` or `false`.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use zenoline_core::quad::ConvergenceReport;
use zenoline_core::zeno::Segment;
use zenoline_core::Regime;

use crate::error::CliError;

pub const CSV_HEADER: &str = "tau,s,gamma,regime,valid";
pub const SIGNIFICANT_DIGITS: i32 = 12;

/// `x` rounded to 12 significant digits.
pub fn format_number(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..=15).contains(&exponent) {
        let decimals = (SIGNIFICANT_DIGITS - 1 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.*e}", (SIGNIFICANT_DIGITS - 1) as usize)
    }
}

/// Value as it will read back from the CSV.
pub fn rounded(x: f64) -> f64 {
    format_number(x).parse().expect("formatted floats parse")
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub tau: f64,
    pub s: f64,
    pub gamma: f64,
    pub regime: Regime,
    pub valid: bool,
}

pub fn write_csv(rows: &[CsvRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_number(r.tau),
            format_number(r.s),
            format_number(r.gamma),
            r.regime,
            r.valid
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(CliError::Config(format!("expected CSV header `{CSV_HEADER}`, found {other:?}"))),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let bad = |what: &str| CliError::Config(format!("CSV line {}: {what}", i + 2));
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(bad("expected 5 fields"));
            }
            let num = |k: usize| fields[k].parse::<f64>().map_err(|_| bad(&format!("`{}` is not a number", fields[k])));
            Ok(CsvRow {
                tau: num(0)?,
                s: num(1)?,
                gamma: num(2)?,
                regime: fields[3].parse().map_err(|_| bad(&format!("unknown regime `{}`", fields[3])))?,
                valid: fields[4].parse().map_err(|_| bad(&format!("`{}` is not true/false", fields[4])))?,
            })
        })
        .collect()
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_owned(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

pub fn unix_timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimalInterval {
    pub tau: f64,
    pub gamma: f64,
}

/// Per-curve diagnostics written into every JSON sidecar.
#[derive(Clone, Debug, Serialize)]
pub struct CurveSummary {
    pub kernel_evals: u64,
    pub convergence: Option<ConvergenceReport>,
    pub segments: Vec<Segment>,
    pub optimal_interval: OptimalInterval,
    pub points_outside_validity: usize,
}

/// JSON sidecar wrapper: tool identity and wall-clock timestamp around
/// a run-specific body.
#[derive(Debug, Serialize)]
pub struct Sidecar<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub generated_unix_seconds: u64,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Sidecar<T> {
    pub fn new(body: T) -> Self {
        Sidecar { tool: "zenoline", version: env!("CARGO_PKG_VERSION"), generated_unix_seconds: unix_timestamp(), body }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| CliError::Config(format!("serializing metadata: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(0.02), "0.0200000000000");
        assert_eq!(format_number(3.0), "3.00000000000");
        assert_eq!(format_number(0.04508661613605385), "0.0450866161361");
        assert_eq!(format_number(123.456), "123.456000000");
        assert_eq!(format_number(-1.5e-7), "-1.50000000000e-7");
        assert_eq!(format_number(0.0), "0");
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 9.999999999999999, 1e-9 / 7.0, 123456.789] {
            let r = rounded(x);
            assert_eq!(rounded(r), r);
            assert!((r - x).abs() <= 1e-11 * x.abs());
        }
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            CsvRow { tau: 0.02, s: 0.999, gamma: 0.05, regime: Regime::Zeno, valid: true },
            CsvRow { tau: 0.04, s: 0.8, gamma: 0.04, regime: Regime::AntiZeno, valid: false },
        ];
        let text = write_csv(&rows);
        assert!(text.starts_with("tau,s,gamma,regime,valid\n"));
        assert_eq!(parse_csv(&text).unwrap(), rows);
    }

    #[test]
    fn malformed_csv_names_the_line() {
        let err = parse_csv("tau,s,gamma,regime,valid\n0.1,0.9,0.2,zeno,true\n0.2,x,0.2,zeno,true\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }
}
