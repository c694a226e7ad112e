//! Analytical performance of the proposed scheme.
//!
//! Under the proposed `(f*, ψ*)` the effective channel `ξ₁ + μξ₂` is a
//! circular complex Gaussian with mean `m` and variance `σ²`, so its
//! magnitude is Rice distributed with noncentrality `ν = |m|` and
//! per-component scale `σ/√2`. Outage and ergodic capacity follow from the
//! Rice CDF, `P[|ξ₁ + μξ₂| ≤ r] = 1 − Q₁(√2 ν/σ, √2 r/σ)`.

pub mod marcum;
pub mod quadrature;

pub use marcum::{marcum_q1, marcum_q1_pair, MarcumQ};
pub use quadrature::{integrate, integrate_with_breaks, Integral, QuadratureSpec};

use std::f64::consts::{LN_2, SQRT_2};

use crate::beamforming::BeamformerSolution;
use crate::channel::Scenario;
use crate::{Complex64, Error, Result};

/// Rice parameters of the effective gain `|ξ₁ + μξ₂|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiceGainStats {
    /// Noncentrality `ν = |m|`.
    pub nu: f64,
    /// `σ` with `σ²` the variance of the complex gain.
    pub sigma: f64,
    /// `arg m`.
    pub mean_phase: f64,
}

impl RiceGainStats {
    /// Complex mean `m` of `ξ₁ + μξ₂`.
    pub fn complex_mean(&self) -> Complex64 {
        Complex64::from_polar(self.nu, self.mean_phase)
    }

    /// Per-component standard deviation of the Rice law, `σ/√2`.
    pub fn rice_scale(&self) -> f64 {
        self.sigma / SQRT_2
    }

    /// `E[|ξ₁ + μξ₂|²] = ν² + σ²`.
    pub fn mean_square(&self) -> f64 {
        self.nu * self.nu + self.sigma * self.sigma
    }

    fn require_spread(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() || !(self.nu >= 0.0) {
            return Err(Error::InvalidStats(format!(
                "need sigma > 0 and nu >= 0, got nu = {}, sigma = {}",
                self.nu, self.sigma
            )));
        }
        Ok(())
    }

    /// `P[|ξ₁ + μξ₂| ≤ r]` as `(cdf, 1 − cdf)`.
    pub fn cdf_pair(&self, r: f64) -> Result<(f64, f64)> {
        self.require_spread()?;
        let s = self.rice_scale();
        let q = marcum_q1_pair(self.nu / s, r.max(0.0) / s)?;
        Ok((q.complement, q.q))
    }

    pub fn cdf(&self, r: f64) -> Result<f64> {
        self.cdf_pair(r).map(|(c, _)| c)
    }
}

/// Rice statistics of the gain for a solution whose phases are aligned as in
/// the proposed scheme.
pub fn rice_gain_stats(solution: &BeamformerSolution, scenario: &Scenario) -> Result<RiceGainStats> {
    let los = &scenario.los;
    if solution.f.len() != los.m() {
        return Err(Error::DimensionMismatch {
            what: "beamformer",
            expected: los.m(),
            actual: solution.f.len(),
        });
    }
    let kl = scenario.kappa.kappa_l;
    let kn = scenario.kappa.kappa_n;
    let n = scenario.config.n as f64;
    let mu = scenario.config.mu;
    let e0f = los.cascade_row().dot(&solution.f).norm();
    let gf = los.g_bar.dot(&solution.f);
    if e0f <= 1e-12 && gf.norm() <= 1e-12 {
        return Err(Error::DegenerateBeam(
            "beam orthogonal to both the cascade and the direct LoS",
        ));
    }
    let nu = n * kl * kl * e0f + mu * kl * gf.norm();
    let variance = n * kn * kn * (1.0 + kl * kl * e0f * e0f) + mu * mu * kn * kn;
    Ok(RiceGainStats {
        nu,
        sigma: variance.sqrt(),
        mean_phase: if gf.norm() > 1e-12 { gf.arg() } else { 0.0 },
    })
}

/// `P[SNR ≤ β]` under the Rice gain model, `SNR = γ |ξ₁ + μξ₂|²`.
pub fn outage_analytical(beta: f64, stats: &RiceGainStats, gamma: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::invalid("beta", format!("must be >= 0, got {beta}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma", format!("must be finite and > 0, got {gamma}")));
    }
    if beta.is_infinite() {
        stats.require_spread()?;
        return Ok(1.0);
    }
    stats.cdf((beta / gamma).sqrt())
}

/// Ergodic capacity `E[log₂(1 + γ |ξ₁ + μξ₂|²)]` in bits per channel use,
/// from the tail-integral form `(1/ln 2) ∫₀^∞ P[SNR > u] / (1 + u) du`.
///
/// The integral is evaluated in the gain variable `r` (`u = γ r²`) where
/// the integrand `Q₁(√2ν/σ, √2r/σ) · 2γr / (1 + γr²)` is smooth, and is
/// truncated once the Marcum factor drops below the truncation cutoff.
pub fn ergodic_capacity_analytical(stats: &RiceGainStats, gamma: f64, quad: &QuadratureSpec) -> Result<f64> {
    ergodic_capacity_integral(stats, gamma, quad).map(|i| i.value)
}

pub fn ergodic_capacity_integral(stats: &RiceGainStats, gamma: f64, quad: &QuadratureSpec) -> Result<Integral> {
    stats.require_spread()?;
    quad.validate()?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma", format!("must be finite and > 0, got {gamma}")));
    }
    let s = stats.rice_scale();
    let a = stats.nu / s;
    let tail = |r: f64| marcum_q1_pair(a, r / s).map(|q| q.q).unwrap_or(0.0);

    let mut r_max = stats.nu + s;
    while tail(r_max) >= quad.truncation_cutoff {
        r_max += s;
    }
    let lo = (stats.nu - 10.0 * s).max(0.0);
    let mut breaks = vec![0.0];
    if lo > 0.0 {
        breaks.push(lo);
    }
    if stats.nu > lo {
        breaks.push(stats.nu);
    }
    breaks.push(r_max);

    let integrand = |r: f64| tail(r) * 2.0 * gamma * r / (1.0 + gamma * r * r);
    let body = integrate_with_breaks(integrand, &breaks, quad)?;
    // Beyond r_max the Marcum factor is below the cutoff and decays at least
    // on the scale s, while 2γr/(1+γr²) ≤ 2/r.
    let tail_bound = tail(r_max) * 2.0 * s / r_max;
    Ok(Integral {
        value: body.value / LN_2,
        abs_error: (body.abs_error + tail_bound) / LN_2,
        subdivisions: body.subdivisions,
    })
}
