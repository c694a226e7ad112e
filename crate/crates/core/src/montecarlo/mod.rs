//! Monte Carlo estimation of outage probability and ergodic capacity.
//!
//! Sample `i` of a run with seed `s` always draws its channel from the
//! substream `(s, i)`, and per-chunk tallies are merged in chunk order, so a
//! run's result depends only on `(plan, scenario)` and never on the number
//! of worker threads.

mod validate;

pub use validate::{
    ks_critical_value, validate_gain_distribution, validate_scatter_terms, GainFit, GainFitReport, MomentCheck,
    ScatterTermReport,
};

use crate::beamforming::{
    design_max_mean_snr, design_max_snr, design_proposed, instantaneous_snr, AlternatingSettings, BeamformerSolution,
    Scheme,
};
use crate::channel::Scenario;
use crate::exec::{map_chunks, Parallelism};
use crate::rng::RandomStream;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationPlan {
    pub n_samples: u64,
    pub seed: u64,
    /// Outage thresholds in dB; may be empty for capacity-only runs.
    pub beta_grid_db: Vec<f64>,
    pub schemes: Vec<Scheme>,
}

impl SimulationPlan {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::invalid("n_samples", "must be >= 1"));
        }
        if self.beta_grid_db.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("beta_grid_db", "entries must be finite"));
        }
        if self.beta_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("beta_grid_db", "must be strictly increasing"));
        }
        if self.schemes.is_empty() {
            return Err(Error::invalid("schemes", "at least one scheme is required"));
        }
        Ok(())
    }

    fn scheme_list(&self) -> Vec<Scheme> {
        let mut s = self.schemes.clone();
        s.sort();
        s.dedup();
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    pub beta_db: f64,
    pub probability: f64,
    /// Binomial standard error `√(p̂(1 − p̂)/n)`.
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeEstimate {
    pub scheme: Scheme,
    pub outage: Vec<ProbabilityEstimate>,
    /// Mean of `log₂(1 + SNR)`.
    pub capacity: MeanEstimate,
    pub mean_snr: MeanEstimate,
    /// Realizations where the per-sample optimizer hit its iteration cap
    /// (MaxSnr only). Those samples still use the best iterate.
    pub nonconverged: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalResult {
    pub n_samples: u64,
    pub seed: u64,
    pub schemes: Vec<SchemeEstimate>,
    /// Samples with MaxSnr SNR strictly below the Proposed SNR, when both
    /// schemes ran.
    pub maxsnr_below_proposed: Option<u64>,
}

impl EmpiricalResult {
    pub fn scheme(&self, scheme: Scheme) -> Option<&SchemeEstimate> {
        self.schemes.iter().find(|s| s.scheme == scheme)
    }
}

/// Statistical-CSI solutions shared by every sample of a run.
#[derive(Debug, Clone)]
pub struct StatisticalDesigns {
    pub proposed: BeamformerSolution,
    pub max_mean_snr: Option<BeamformerSolution>,
}

impl StatisticalDesigns {
    pub fn compute(scenario: &Scenario, need_max_mean: bool) -> Result<Self> {
        let proposed = design_proposed(scenario)?;
        let max_mean_snr = if need_max_mean {
            Some(design_max_mean_snr(scenario, &proposed, AlternatingSettings::MAX_MEAN_SNR)?.solution)
        } else {
            None
        };
        Ok(Self { proposed, max_mean_snr })
    }
}

#[derive(Debug, Clone)]
struct SchemeTally {
    below: Vec<u64>,
    log_sum: f64,
    log_sq: f64,
    snr_sum: f64,
    snr_sq: f64,
    nonconverged: u64,
}

impl SchemeTally {
    fn new(grid: usize) -> Self {
        Self {
            below: vec![0; grid],
            log_sum: 0.0,
            log_sq: 0.0,
            snr_sum: 0.0,
            snr_sq: 0.0,
            nonconverged: 0,
        }
    }

    fn record(&mut self, snr: f64, thresholds: &[f64]) {
        for (count, &beta) in self.below.iter_mut().zip(thresholds) {
            if snr <= beta {
                *count += 1;
            }
        }
        let bits = snr.ln_1p() / std::f64::consts::LN_2;
        self.log_sum += bits;
        self.log_sq += bits * bits;
        self.snr_sum += snr;
        self.snr_sq += snr * snr;
    }

    fn merge(&mut self, other: &SchemeTally) {
        for (a, b) in self.below.iter_mut().zip(&other.below) {
            *a += b;
        }
        self.log_sum += other.log_sum;
        self.log_sq += other.log_sq;
        self.snr_sum += other.snr_sum;
        self.snr_sq += other.snr_sq;
        self.nonconverged += other.nonconverged;
    }
}

fn mean_estimate(sum: f64, sum_sq: f64, n: u64) -> MeanEstimate {
    let nf = n as f64;
    let mean = sum / nf;
    let std_error = if n > 1 {
        let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        (var / nf).sqrt()
    } else {
        0.0
    };
    MeanEstimate { mean, std_error }
}

pub fn simulate(plan: &SimulationPlan, scenario: &Scenario, parallelism: Parallelism) -> Result<EmpiricalResult> {
    plan.validate()?;
    let schemes = plan.scheme_list();
    let designs = StatisticalDesigns::compute(scenario, schemes.contains(&Scheme::MaxMeanSnr))?;
    simulate_with(plan, scenario, &designs, parallelism)
}

/// [`simulate`] with precomputed statistical designs.
pub fn simulate_with(
    plan: &SimulationPlan,
    scenario: &Scenario,
    designs: &StatisticalDesigns,
    parallelism: Parallelism,
) -> Result<EmpiricalResult> {
    plan.validate()?;
    let schemes = plan.scheme_list();
    let thresholds: Vec<f64> = plan.beta_grid_db.iter().map(|db| 10f64.powf(db / 10.0)).collect();
    let gamma = scenario.config.gamma;
    let mu = scenario.config.mu;
    let both = schemes.contains(&Scheme::Proposed) && schemes.contains(&Scheme::MaxSnr);
    let max_mean = match (schemes.contains(&Scheme::MaxMeanSnr), &designs.max_mean_snr) {
        (true, None) => {
            Some(design_max_mean_snr(scenario, &designs.proposed, AlternatingSettings::MAX_MEAN_SNR)?.solution)
        }
        (_, m) => m.clone(),
    };

    let chunk_tallies = map_chunks(
        plan.n_samples,
        parallelism,
        |range| -> Result<(Vec<SchemeTally>, u64)> {
            let mut tallies: Vec<SchemeTally> = schemes.iter().map(|_| SchemeTally::new(thresholds.len())).collect();
            let mut violations = 0u64;
            for i in range {
                let mut stream = RandomStream::for_sample(plan.seed, i);
                let realization = scenario.sample(&mut stream);
                let mut proposed_snr = None;
                let mut maxsnr_snr = None;
                for (scheme, tally) in schemes.iter().zip(tallies.iter_mut()) {
                    let snr = match scheme {
                        Scheme::Proposed => {
                            let s =
                                instantaneous_snr(&designs.proposed.f, &designs.proposed.psi, &realization, gamma, mu)?;
                            proposed_snr = Some(s);
                            s
                        }
                        Scheme::MaxMeanSnr => {
                            let sol = max_mean.as_ref().expect("max-mean design computed above");
                            instantaneous_snr(&sol.f, &sol.psi, &realization, gamma, mu)?
                        }
                        Scheme::MaxSnr => {
                            let out = design_max_snr(
                                &realization,
                                scenario,
                                &designs.proposed,
                                AlternatingSettings::MAX_SNR,
                            )?;
                            if !out.converged {
                                tally.nonconverged += 1;
                            }
                            let s = out.objective();
                            maxsnr_snr = Some(s);
                            s
                        }
                    };
                    tally.record(snr, &thresholds);
                }
                if let (Some(p), Some(m)) = (proposed_snr, maxsnr_snr) {
                    if m < p {
                        violations += 1;
                    }
                }
            }
            Ok((tallies, violations))
        },
    );

    let mut total: Vec<SchemeTally> = schemes.iter().map(|_| SchemeTally::new(thresholds.len())).collect();
    let mut violations = 0u64;
    for chunk in chunk_tallies {
        let (tallies, v) = chunk?;
        for (t, c) in total.iter_mut().zip(&tallies) {
            t.merge(c);
        }
        violations += v;
    }

    let n = plan.n_samples;
    let nf = n as f64;
    let estimates = schemes
        .iter()
        .zip(total)
        .map(|(&scheme, t)| SchemeEstimate {
            scheme,
            outage: plan
                .beta_grid_db
                .iter()
                .zip(&t.below)
                .map(|(&beta_db, &count)| {
                    let p = count as f64 / nf;
                    ProbabilityEstimate {
                        beta_db,
                        probability: p,
                        std_error: (p * (1.0 - p) / nf).sqrt(),
                    }
                })
                .collect(),
            capacity: mean_estimate(t.log_sum, t.log_sq, n),
            mean_snr: mean_estimate(t.snr_sum, t.snr_sq, n),
            nonconverged: t.nonconverged,
        })
        .collect();

    Ok(EmpiricalResult {
        n_samples: n,
        seed: plan.seed,
        schemes: estimates,
        maxsnr_below_proposed: both.then_some(violations),
    })
}
