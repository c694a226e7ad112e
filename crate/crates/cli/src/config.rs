//! Experiment configuration file.
//!
//! Every key is optional; an empty file reproduces the default study
//! (M = 4, N = 32, K = 5, γ = 0 dB, μ = 5 dB). Angles are in degrees and
//! link budgets in dB.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use ris_core::beamforming::Scheme;
use ris_core::channel::{link_budget_from_db, SystemConfig};

use crate::error::{CliError, Result};

/// Longest grid a sweep specification may expand to.
const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemSection,
    pub simulation: SimulationSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub m: usize,
    pub n: usize,
    /// Rician factor, linear; `inf` selects a LoS-only channel.
    pub k: f64,
    pub theta_dd_deg: f64,
    pub theta_di1_deg: f64,
    pub theta_di2_deg: f64,
    pub theta_ai1_deg: f64,
    pub gamma_db: f64,
    pub mu_db: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            m: 4,
            n: 32,
            k: 5.0,
            theta_dd_deg: 0.0,
            theta_di1_deg: 45.0,
            theta_di2_deg: 288.0,
            theta_ai1_deg: 0.0,
            gamma_db: 0.0,
            mu_db: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub seed: u64,
    pub outage_samples: u64,
    pub sweep_samples: u64,
    pub validate_samples: u64,
    pub schemes: Vec<String>,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            seed: 1,
            outage_samples: 1_000_000,
            sweep_samples: 100_000,
            validate_samples: 100_000,
            schemes: Scheme::ALL.iter().map(|s| s.name().to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub beta_db_start: f64,
    pub beta_db_stop: f64,
    pub beta_db_step: f64,
    pub n_values: Vec<usize>,
    pub mu_db_values: Vec<f64>,
    /// Additional γ values (dB) for the μ sweep, one output file each.
    pub mu_extra_gamma_db: Vec<f64>,
    pub theta_start_deg: f64,
    pub theta_stop_deg: f64,
    pub theta_step_deg: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            beta_db_start: 20.0,
            beta_db_stop: 40.0,
            beta_db_step: 0.5,
            n_values: vec![8, 16, 32, 64],
            mu_db_values: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
            mu_extra_gamma_db: vec![10.0],
            theta_start_deg: 0.0,
            theta_stop_deg: 90.0,
            theta_step_deg: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("{}: {e}", origin.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Checks every derived quantity so that errors surface before any
    /// computation starts.
    pub fn validate(&self) -> Result<()> {
        self.system_config()?;
        self.schemes()?;
        self.beta_grid_db()?;
        self.theta_grid_rad()?;
        self.n_values()?;
        finite("sweep.mu_db_values", &self.sweep.mu_db_values)?;
        finite("sweep.mu_extra_gamma_db", &self.sweep.mu_extra_gamma_db)?;
        if self.sweep.mu_db_values.is_empty() {
            return Err(CliError::Config("sweep.mu_db_values must not be empty".into()));
        }
        for (name, v) in [
            ("simulation.outage_samples", self.simulation.outage_samples),
            ("simulation.sweep_samples", self.simulation.sweep_samples),
            ("simulation.validate_samples", self.simulation.validate_samples),
        ] {
            if v < 2 {
                return Err(CliError::Config(format!("{name} must be >= 2, got {v}")));
            }
        }
        Ok(())
    }

    pub fn system_config(&self) -> Result<SystemConfig> {
        let s = &self.system;
        finite(
            "system",
            &[
                s.theta_dd_deg,
                s.theta_di1_deg,
                s.theta_di2_deg,
                s.theta_ai1_deg,
                s.gamma_db,
                s.mu_db,
            ],
        )?;
        let (gamma, mu) = link_budget_from_db(s.gamma_db, s.mu_db);
        let config = SystemConfig {
            m: s.m,
            n: s.n,
            k: s.k,
            theta_dd: s.theta_dd_deg.to_radians(),
            theta_di1: s.theta_di1_deg.to_radians(),
            theta_di2: s.theta_di2_deg.to_radians(),
            theta_ai1: s.theta_ai1_deg.to_radians(),
            gamma,
            mu,
        };
        config.validate().map_err(|e| CliError::Config(format!("system.{e}")))?;
        Ok(config)
    }

    pub fn schemes(&self) -> Result<Vec<Scheme>> {
        if self.simulation.schemes.is_empty() {
            return Err(CliError::Config("simulation.schemes must not be empty".into()));
        }
        self.simulation
            .schemes
            .iter()
            .map(|name| {
                Scheme::from_name(name).ok_or_else(|| {
                    CliError::Config(format!(
                        "simulation.schemes: unknown scheme {name:?} (expected proposed, max-mean-snr or max-snr)"
                    ))
                })
            })
            .collect()
    }

    pub fn beta_grid_db(&self) -> Result<Vec<f64>> {
        let s = &self.sweep;
        linear_grid("sweep.beta_db", s.beta_db_start, s.beta_db_stop, s.beta_db_step)
    }

    pub fn theta_grid_rad(&self) -> Result<Vec<f64>> {
        let s = &self.sweep;
        let deg = linear_grid("sweep.theta", s.theta_start_deg, s.theta_stop_deg, s.theta_step_deg)?;
        Ok(deg.into_iter().map(f64::to_radians).collect())
    }

    pub fn n_values(&self) -> Result<Vec<f64>> {
        let v = &self.sweep.n_values;
        if v.is_empty() || v.contains(&0) {
            return Err(CliError::Config("sweep.n_values must be nonempty and positive".into()));
        }
        Ok(v.iter().map(|&n| n as f64).collect())
    }
}

fn finite(name: &str, values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(CliError::Config(format!("{name}: values must be finite, got {v}"))),
        None => Ok(()),
    }
}

/// `start, start + step, …` up to and including `stop` (within rounding).
fn linear_grid(name: &str, start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    finite(name, &[start, stop, step])?;
    if !(step > 0.0) || stop < start {
        return Err(CliError::Config(format!(
            "{name}: need step > 0 and stop >= start, got start {start}, stop {stop}, step {step}"
        )));
    }
    let intervals = ((stop - start) / step + 1e-9).floor();
    if intervals >= MAX_GRID_POINTS as f64 {
        return Err(CliError::Config(format!(
            "{name}: grid exceeds {MAX_GRID_POINTS} points"
        )));
    }
    Ok((0..=intervals as usize).map(|i| start + i as f64 * step).collect())
}
