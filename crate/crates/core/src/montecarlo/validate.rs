//! Empirical checks of the Rice gain model.

use crate::analysis::{rice_gain_stats, RiceGainStats};
use crate::beamforming::{design_proposed, BeamformerSolution};
use crate::channel::{ChannelRealization, ScatterDraw, Scenario};
use crate::exec::{map_chunks, Parallelism};
use crate::rng::RandomStream;
use crate::{Complex64, Error, Result};

/// Asymptotic Kolmogorov–Smirnov critical value at the 1% level.
pub fn ks_critical_value(n: u64) -> f64 {
    1.6276 / (n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainFit {
    Tested {
        ks_statistic: f64,
        critical_value: f64,
        passed: bool,
    },
    /// No scatter power: the gain is the constant `ν` and the Rice law does
    /// not apply.
    Degenerate { max_abs_deviation: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainFitReport {
    pub n_samples: u64,
    pub stats: RiceGainStats,
    pub fit: GainFit,
}

fn gain_samples(
    scenario: &Scenario,
    solution: &BeamformerSolution,
    n: u64,
    seed: u64,
    parallelism: Parallelism,
) -> Result<Vec<f64>> {
    let mu = scenario.config.mu;
    let chunks = map_chunks(n, parallelism, |range| -> Result<Vec<f64>> {
        range
            .map(|i| {
                let r = scenario.sample(&mut RandomStream::for_sample(seed, i));
                crate::beamforming::instantaneous_snr(&solution.f, &solution.psi, &r, 1.0, mu).map(f64::sqrt)
            })
            .collect()
    });
    let mut out = Vec::with_capacity(n as usize);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// One-sample KS test of `|ξ₁ + μξ₂|` under the proposed solution against
/// the Rice CDF.
pub fn validate_gain_distribution(
    scenario: &Scenario,
    n_samples: u64,
    seed: u64,
    parallelism: Parallelism,
) -> Result<GainFitReport> {
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "must be >= 1"));
    }
    let solution = design_proposed(scenario)?;
    let stats = rice_gain_stats(&solution, scenario)?;
    let mut samples = gain_samples(scenario, &solution, n_samples, seed, parallelism)?;

    if stats.sigma == 0.0 {
        let max_abs_deviation = samples.iter().map(|x| (x - stats.nu).abs()).fold(0.0, f64::max);
        return Ok(GainFitReport {
            n_samples,
            stats,
            fit: GainFit::Degenerate { max_abs_deviation },
        });
    }

    samples.sort_by(f64::total_cmp);
    let nf = n_samples as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let c = stats.cdf(x)?;
        d = d.max((i as f64 + 1.0) / nf - c).max(c - i as f64 / nf);
    }
    let critical_value = ks_critical_value(n_samples);
    Ok(GainFitReport {
        n_samples,
        stats,
        fit: GainFit::Tested {
            ks_statistic: d,
            critical_value,
            passed: d <= critical_value,
        },
    })
}

/// A measured statistic against its model value.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCheck {
    pub name: &'static str,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    /// Whether `tolerance` is relative to `expected` or absolute.
    pub relative: bool,
}

impl MomentCheck {
    pub fn error(&self) -> f64 {
        let e = (self.measured - self.expected).abs();
        if self.relative {
            e / self.expected.abs()
        } else {
            e
        }
    }

    pub fn passed(&self) -> bool {
        self.error() <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterTermReport {
    pub n_samples: u64,
    pub checks: Vec<MomentCheck>,
}

impl ScatterTermReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(MomentCheck::passed)
    }
}

/// Relative tolerance on the sampled variances.
const VARIANCE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, Default)]
struct TermSums {
    sum: [Complex64; 4],
    sq: [f64; 4],
}

/// Checks the unit-variance structure of the scatter terms of the gain
/// under the proposed solution:
///
/// ```text
/// a₁ = ψᵀ diag(h̄) H̄ f      (deterministic)
/// a₂ = ψᵀ diag(h̄) H̃ f      Var = N
/// a₃ = ψᵀ diag(h̃) H̄ f      Var = ‖H̄f‖² = N |e₀f|²
/// a₄ = ψᵀ diag(h̃) H̃ f      Var = N
/// b₂ = g̃ᵀ f                Var = 1
/// ```
pub fn validate_scatter_terms(
    scenario: &Scenario,
    n_samples: u64,
    seed: u64,
    parallelism: Parallelism,
) -> Result<ScatterTermReport> {
    if n_samples < 2 {
        return Err(Error::invalid("n_samples", "must be >= 2"));
    }
    let solution = design_proposed(scenario)?;
    let los = &scenario.los;
    let (f, psi) = (&solution.f, &solution.psi);
    let (m, n) = (los.m(), los.n());
    let nf = n as f64;

    let hf_bar = &los.h_mat_bar * f;
    let a1: Complex64 = (0..n).map(|k| psi[k] * los.h_bar[k] * hf_bar[k]).sum();
    let e0f = los.cascade_row().dot(f).norm();
    let gf = los.g_bar.dot(f);
    let a1_model = Complex64::from_polar(nf * e0f, if gf.norm() > 1e-12 { gf.arg() } else { a1.arg() });

    let chunks = map_chunks(n_samples, parallelism, |range| {
        let mut t = TermSums::default();
        for i in range {
            let s = ScatterDraw::sample(m, n, &mut RandomStream::for_sample(seed, i));
            let hf_tilde = &s.h_mat_tilde * f;
            let mut terms = [Complex64::new(0.0, 0.0); 4];
            for k in 0..n {
                terms[0] += psi[k] * los.h_bar[k] * hf_tilde[k];
                terms[1] += psi[k] * s.h_tilde[k] * hf_bar[k];
                terms[2] += psi[k] * s.h_tilde[k] * hf_tilde[k];
            }
            terms[3] = s.g_tilde.dot(f);
            for ((sum, sq), term) in t.sum.iter_mut().zip(&mut t.sq).zip(terms) {
                *sum += term;
                *sq += term.norm_sqr();
            }
        }
        t
    });
    let mut total = TermSums::default();
    for c in chunks {
        for (a, b) in total.sum.iter_mut().zip(c.sum) {
            *a += b;
        }
        for (a, b) in total.sq.iter_mut().zip(c.sq) {
            *a += b;
        }
    }
    let count = n_samples as f64;
    let variance = |j: usize| {
        let mean = total.sum[j] / count;
        (total.sq[j] - count * mean.norm_sqr()) / (count - 1.0)
    };

    let mut checks = vec![
        MomentCheck {
            name: "a1 deterministic term",
            measured: (a1 - a1_model).norm(),
            expected: 0.0,
            tolerance: 1e-9 * nf,
            relative: false,
        },
        MomentCheck {
            name: "|H f|^2 = N |e0 f|^2",
            measured: hf_bar.norm_squared(),
            expected: nf * e0f * e0f,
            tolerance: 1e-9,
            relative: true,
        },
    ];
    let model = [
        ("Var a2", nf),
        ("Var a3", hf_bar.norm_squared()),
        ("Var a4", nf),
        ("Var b2", 1.0),
    ];
    for (j, (name, expected)) in model.into_iter().enumerate() {
        checks.push(MomentCheck {
            name,
            measured: variance(j),
            expected,
            tolerance: VARIANCE_TOLERANCE,
            relative: true,
        });
    }
    // The assembled gain reproduces the Rice moments.
    let stats = rice_gain_stats(&solution, scenario)?;
    if scenario.kappa.kappa_n > 0.0 {
        let mu = scenario.config.mu;
        let chunks = map_chunks(n_samples, parallelism, |range| -> Result<f64> {
            let mut sq = 0.0;
            for i in range {
                let r: ChannelRealization = scenario.sample(&mut RandomStream::for_sample(seed ^ 0x9e37_79b9, i));
                sq += crate::beamforming::instantaneous_snr(f, psi, &r, 1.0, mu)?;
            }
            Ok(sq)
        });
        let mut sq = 0.0;
        for c in chunks {
            sq += c?;
        }
        checks.push(MomentCheck {
            name: "E|xi1 + mu xi2|^2",
            measured: sq / count,
            expected: stats.mean_square(),
            tolerance: VARIANCE_TOLERANCE,
            relative: true,
        });
    }
    Ok(ScatterTermReport { n_samples, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SystemConfig;

    #[test]
    fn critical_value_example() {
        assert!((ks_critical_value(100_000) - 0.005147).abs() < 1e-6);
    }

    #[test]
    fn default_gain_passes_ks() {
        let sc = Scenario::new(SystemConfig::default()).unwrap();
        let r = validate_gain_distribution(&sc, 20_000, 5, Parallelism::Auto).unwrap();
        match r.fit {
            GainFit::Tested {
                passed, ks_statistic, ..
            } => assert!(passed, "D = {ks_statistic}"),
            GainFit::Degenerate { .. } => panic!("unexpected degenerate fit"),
        }
    }

    #[test]
    fn misspecified_model_fails_ks() {
        // Halving σ in the model must be detected.
        let sc = Scenario::new(SystemConfig::default()).unwrap();
        let sol = design_proposed(&sc).unwrap();
        let st = rice_gain_stats(&sol, &sc).unwrap();
        let wrong = RiceGainStats {
            sigma: st.sigma / 2.0,
            ..st
        };
        let mut x = gain_samples(&sc, &sol, 20_000, 5, Parallelism::Auto).unwrap();
        x.sort_by(f64::total_cmp);
        let n = x.len() as f64;
        let d = x
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let c = wrong.cdf(v).unwrap();
                ((i as f64 + 1.0) / n - c).max(c - i as f64 / n)
            })
            .fold(0.0, f64::max);
        assert!(d > ks_critical_value(20_000));
    }

    #[test]
    fn los_only_is_degenerate() {
        let sc = Scenario::new(SystemConfig {
            k: f64::INFINITY,
            ..SystemConfig::default()
        })
        .unwrap();
        let r = validate_gain_distribution(&sc, 100, 5, Parallelism::Auto).unwrap();
        match r.fit {
            GainFit::Degenerate { max_abs_deviation } => assert!(max_abs_deviation < 1e-9 * r.stats.nu),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scatter_terms_hold_at_defaults() {
        let sc = Scenario::new(SystemConfig::default()).unwrap();
        let r = validate_scatter_terms(&sc, 20_000, 9, Parallelism::Auto).unwrap();
        for c in &r.checks {
            assert!(c.passed(), "{c:?}");
        }
    }
}
