//! Outage and capacity experiments combining the analytical model with
//! Monte Carlo estimates.

use crate::analysis::{ergodic_capacity_analytical, outage_analytical, rice_gain_stats, QuadratureSpec, RiceGainStats};
use crate::beamforming::{design_proposed, BeamformerSolution};
use crate::channel::{Scenario, SystemConfig};
use crate::exec::Parallelism;
use crate::montecarlo::{simulate, EmpiricalResult, SimulationPlan};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OutageExperiment {
    pub solution: BeamformerSolution,
    pub stats: RiceGainStats,
    /// Analytical outage of the proposed scheme, one per grid point.
    pub analytical: Vec<f64>,
    pub empirical: EmpiricalResult,
}

pub fn outage_experiment(
    config: &SystemConfig,
    plan: &SimulationPlan,
    parallelism: Parallelism,
) -> Result<OutageExperiment> {
    if plan.beta_grid_db.is_empty() {
        return Err(Error::invalid(
            "beta_grid_db",
            "an outage run needs at least one threshold",
        ));
    }
    let scenario = Scenario::new(config.clone())?;
    let solution = design_proposed(&scenario)?;
    let stats = rice_gain_stats(&solution, &scenario)?;
    let analytical = plan
        .beta_grid_db
        .iter()
        .map(|db| outage_analytical(10f64.powf(db / 10.0), &stats, config.gamma))
        .collect::<Result<Vec<_>>>()?;
    let empirical = simulate(plan, &scenario, parallelism)?;
    Ok(OutageExperiment {
        solution,
        stats,
        analytical,
        empirical,
    })
}

/// The parameter varied by a capacity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Number of RIS elements `N`.
    Elements,
    /// Direct/indirect ratio `μ` in dB.
    MuDb,
    /// Departure-angle difference `θ = θ_DI1 − θ_DD` in radians, with
    /// `θ_DD` held fixed.
    Theta,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Elements => "n",
            SweepAxis::MuDb => "mu",
            SweepAxis::Theta => "theta",
        }
    }

    /// `base` with the swept parameter set to `value`.
    pub fn apply(self, base: &SystemConfig, value: f64) -> Result<SystemConfig> {
        let mut c = base.clone();
        match self {
            SweepAxis::Elements => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(Error::invalid(
                        "n",
                        format!("sweep value must be a positive integer, got {value}"),
                    ));
                }
                c.n = value as usize;
            }
            SweepAxis::MuDb => c.mu = 10f64.powf(value / 10.0),
            SweepAxis::Theta => c.theta_di1 = c.theta_dd + value,
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub stats: RiceGainStats,
    /// Analytical ergodic capacity of the proposed scheme, bits/s/Hz.
    pub analytical: f64,
    pub empirical: EmpiricalResult,
}

/// Ergodic capacity over `values` of `axis`, every point simulated with the
/// same seed.
pub fn capacity_sweep(
    base: &SystemConfig,
    axis: SweepAxis,
    values: &[f64],
    plan: &SimulationPlan,
    quad: &QuadratureSpec,
    parallelism: Parallelism,
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::invalid("sweep", "needs at least one value"));
    }
    values
        .iter()
        .map(|&value| {
            let config = axis.apply(base, value)?;
            let scenario = Scenario::new(config)?;
            let solution = design_proposed(&scenario)?;
            let stats = rice_gain_stats(&solution, &scenario)?;
            let analytical = ergodic_capacity_analytical(&stats, scenario.config.gamma, quad)?;
            let empirical = simulate(plan, &scenario, parallelism)?;
            Ok(SweepPoint {
                value,
                stats,
                analytical,
                empirical,
            })
        })
        .collect()
}
