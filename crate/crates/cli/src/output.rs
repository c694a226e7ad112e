//! CSV tables and the key-value solution file.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! value parses back to the identical `f64` and the text never depends on
//! the locale.

use std::fmt::Write as _;
use std::path::Path;

use ris_core::beamforming::Scheme;
use ris_core::montecarlo::{EmpiricalResult, SchemeEstimate};
use ris_core::{CVector, Complex64};

use crate::error::{CliError, Result};

pub const OUTAGE_COLUMNS: [&str; 8] = [
    "beta_db",
    "pout_analytical",
    "pout_mc_proposed",
    "se_proposed",
    "pout_mc_maxmean",
    "se_maxmean",
    "pout_mc_maxsnr",
    "se_maxsnr",
];

pub const SWEEP_COLUMNS: [&str; 8] = [
    "sweep_value",
    "ec_analytical_proposed",
    "ec_mc_proposed",
    "se_proposed",
    "ec_mc_maxmean",
    "se_maxmean",
    "ec_mc_maxsnr",
    "se_maxsnr",
];

/// Scheme order of the Monte Carlo column pairs.
const COLUMN_SCHEMES: [Scheme; 3] = [Scheme::Proposed, Scheme::MaxMeanSnr, Scheme::MaxSnr];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// `re+imj` / `re-imj`.
pub fn fmt_complex(z: Complex64) -> String {
    format!(
        "{:?}{}{:?}j",
        z.re,
        if z.im.is_sign_negative() { "-" } else { "+" },
        z.im.abs()
    )
}

pub fn parse_complex(text: &str) -> Option<Complex64> {
    let body = text.trim().strip_suffix('j')?;
    // The separator is the last sign not belonging to an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re = body[..split].parse().ok()?;
    let im = body[split..].trim_start_matches('+').parse().ok()?;
    Some(Complex64::new(re, im))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Monte Carlo `(estimate, se)` cells for each scheme column pair; blank
/// when the scheme was not simulated.
fn scheme_cells(result: &EmpiricalResult, cell: impl Fn(&SchemeEstimate) -> (f64, f64)) -> Vec<String> {
    COLUMN_SCHEMES
        .iter()
        .flat_map(|&s| match result.scheme(s) {
            Some(est) => {
                let (v, se) = cell(est);
                [fmt_f64(v), fmt_f64(se)]
            }
            None => [String::new(), String::new()],
        })
        .collect()
}

pub fn outage_rows(beta_db: &[f64], analytical: &[f64], empirical: &EmpiricalResult) -> Vec<Vec<String>> {
    beta_db
        .iter()
        .zip(analytical)
        .enumerate()
        .map(|(i, (&b, &a))| {
            let mut row = vec![fmt_f64(b), fmt_f64(a)];
            row.extend(scheme_cells(empirical, |e| {
                (e.outage[i].probability, e.outage[i].std_error)
            }));
            row
        })
        .collect()
}

pub fn sweep_row(value: f64, analytical: f64, empirical: &EmpiricalResult) -> Vec<String> {
    let mut row = vec![fmt_f64(value), fmt_f64(analytical)];
    row.extend(scheme_cells(empirical, |e| (e.capacity.mean, e.capacity.std_error)));
    row
}

/// Contents of the design solution file.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub f: CVector,
    pub psi: CVector,
    /// `(key, value)` scalar summaries in output order.
    pub scalars: Vec<(String, f64)>,
}

impl SolutionFile {
    pub fn render(&self) -> String {
        let mut out = String::from("# transmit beamformer f and RIS phases psi\n");
        let _ = writeln!(out, "m = {}", self.f.len());
        let _ = writeln!(out, "n = {}", self.psi.len());
        for (key, v) in &self.scalars {
            let _ = writeln!(out, "{key} = {}", fmt_f64(*v));
        }
        for (i, z) in self.f.iter().enumerate() {
            let _ = writeln!(out, "f[{i}] = {}", fmt_complex(*z));
        }
        for (i, z) in self.psi.iter().enumerate() {
            let _ = writeln!(out, "psi[{i}] = {}", fmt_complex(*z));
        }
        out
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut m = None;
        let mut n = None;
        let mut f = Vec::new();
        let mut psi = Vec::new();
        let mut scalars = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| format!("line {}: {what}: {line:?}", lineno + 1);
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            let indexed = |prefix: &str| key.strip_prefix(prefix).and_then(|r| r.strip_suffix(']'));
            if let Some(i) = indexed("f[") {
                let z = parse_complex(value).ok_or_else(|| bad("bad complex value"))?;
                push_indexed(&mut f, i, z).map_err(|e| bad(&e))?;
            } else if let Some(i) = indexed("psi[") {
                let z = parse_complex(value).ok_or_else(|| bad("bad complex value"))?;
                push_indexed(&mut psi, i, z).map_err(|e| bad(&e))?;
            } else if key == "m" || key == "n" {
                let v: usize = value.parse().map_err(|_| bad("bad integer"))?;
                *(if key == "m" { &mut m } else { &mut n }) = Some(v);
            } else {
                let v: f64 = value.parse().map_err(|_| bad("bad number"))?;
                scalars.push((key.to_string(), v));
            }
        }
        if m != Some(f.len()) || n != Some(psi.len()) {
            return Err(format!(
                "declared sizes {m:?}/{n:?} do not match {} / {} entries",
                f.len(),
                psi.len()
            ));
        }
        Ok(Self {
            f: CVector::from_vec(f),
            psi: CVector::from_vec(psi),
            scalars,
        })
    }

    pub fn scalar(&self, key: &str) -> Option<f64> {
        self.scalars.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

fn push_indexed(out: &mut Vec<Complex64>, index: &str, z: Complex64) -> std::result::Result<(), String> {
    let i: usize = index.parse().map_err(|_| "bad index".to_string())?;
    if i != out.len() {
        return Err(format!("expected index {}, found {i}", out.len()));
    }
    out.push(z);
    Ok(())
}
