//! Self-checks of the closed-form structure, usable from tests and from the
//! command line.

use crate::beamforming::{
    compute_weights, design_max_mean_snr, design_max_snr, design_proposed, instantaneous_snr, lower_bound_mean_snr,
    mean_snr_exact, phase_shift_for, AlternatingSettings,
};
use crate::channel::Scenario;
use crate::rng::RandomStream;
use crate::{CVector, Complex64, Error, Result};

/// Relative tolerance for the algebraic identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Worst observed error of one check against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

fn relative(a: f64, b: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}

/// A uniformly distributed unit vector of length `m`.
pub fn random_unit_vector(m: usize, stream: &mut RandomStream) -> CVector {
    loop {
        let v = CVector::from_fn(m, |_, _| stream.complex_normal());
        let norm = v.norm();
        if norm > 1e-8 {
            return v / Complex64::new(norm, 0.0);
        }
    }
}

/// Checks the LoS identities and the mean-SNR decomposition for
/// `n_vectors` random unit beams:
///
/// - every row of `E` gives the same `|E[n] f|`;
/// - `‖E f‖² = N |e₀f|²` and `‖H̄ f‖² = ‖E f‖²`;
/// - the aligned phases have unit modulus and give
///   `|κ_l² ψᵀEf + μκ_l ḡᵀf|² = N²κ_l⁴|e₀f|² + μ²κ_l²|ḡᵀf|² + 2Nμκ_l³|e₀f||ḡᵀf|`;
/// - the exact mean SNR equals `γ(w1|e₀f|² + w2|ḡᵀf|² + w3|e₀f||ḡᵀf| + c)`;
/// - exact minus lower bound equals `γ w3 |e₀f||ḡᵀf|`.
pub fn identity_checks(scenario: &Scenario, n_vectors: usize, seed: u64) -> Result<Vec<CheckResult>> {
    if n_vectors == 0 {
        return Err(Error::invalid("n_vectors", "must be >= 1"));
    }
    let los = &scenario.los;
    let n = los.n() as f64;
    let kl = scenario.kappa.kappa_l;
    let kn = scenario.kappa.kappa_n;
    let mu = scenario.config.mu;
    let gamma = scenario.config.gamma;
    let w = compute_weights(scenario);
    let constant = (kl * kl * kn * kn + kn.powi(4)) * n + mu * mu * kn * kn;
    let e0 = los.cascade_row();

    let mut worst = [0.0f64; 7];
    for i in 0..n_vectors {
        let f = random_unit_vector(los.m(), &mut RandomStream::for_sample(seed, i as u64));
        let ef = &los.cascade * &f;
        let e0f = e0.dot(&f).norm();
        let gf = los.g_bar.dot(&f).norm();

        let rows = ef.iter().map(|z| relative(z.norm(), e0f, e0f)).fold(0.0, f64::max);
        worst[0] = worst[0].max(rows);
        worst[1] = worst[1].max(relative(ef.norm_squared(), n * e0f * e0f, n * e0f * e0f));
        let hf = (&los.h_mat_bar * &f).norm_squared();
        worst[2] = worst[2].max(relative(hf, ef.norm_squared(), ef.norm_squared()));

        let psi = phase_shift_for(&f, los)?;
        worst[3] = worst[3].max(psi.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max));
        let mean = psi.dot(&ef) * (kl * kl) + los.g_bar.dot(&f) * (mu * kl);
        let rhs = n * n * kl.powi(4) * e0f * e0f + mu * mu * kl * kl * gf * gf + 2.0 * n * mu * kl.powi(3) * e0f * gf;
        worst[4] = worst[4].max(relative(mean.norm_sqr(), rhs, rhs));

        let exact = mean_snr_exact(&f, &psi, scenario)?;
        let closed = gamma * (w.w1 * e0f * e0f + w.w2 * gf * gf + w.w3 * e0f * gf + constant);
        worst[5] = worst[5].max(relative(exact, closed, closed));
        let bound = lower_bound_mean_snr(&f, scenario)?;
        worst[6] = worst[6].max(relative(exact - bound, gamma * w.w3 * e0f * gf, exact));
    }
    let names = [
        "equal row gains |E[n] f|",
        "||E f||^2 = N |e0 f|^2",
        "||H f||^2 = ||E f||^2",
        "unit-modulus phases",
        "aligned mean-gain expansion",
        "exact mean SNR closed form",
        "exact minus lower bound = gamma w3 |e0 f||g f|",
    ];
    Ok(names
        .into_iter()
        .zip(worst)
        .map(|(name, worst)| CheckResult {
            name,
            worst,
            tolerance: IDENTITY_TOLERANCE,
        })
        .collect())
}

/// Relative slack allowed in the optimality ordering for rounding.
pub const ORDERING_SLACK: f64 = 1e-12;

/// Checks `exact(MaxMeanSnr) ≥ exact(Proposed) ≥ lower bound(Proposed)` and
/// that the alternating optimizers never lose objective, the latter over
/// `n_realizations` perfect-CSI draws. Each `worst` is the largest relative
/// violation, clamped at zero.
pub fn ordering_checks(scenario: &Scenario, n_realizations: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let proposed = design_proposed(scenario)?;
    let exact = mean_snr_exact(&proposed.f, &proposed.psi, scenario)?;
    let bound = lower_bound_mean_snr(&proposed.f, scenario)?;
    let mean = design_max_mean_snr(scenario, &proposed, AlternatingSettings::MAX_MEAN_SNR)?;
    let mean_value = mean_snr_exact(&mean.solution.f, &mean.solution.psi, scenario)?;

    let mut trace_drop = trace_violation(&mean.trace).max(mean.max_regression);
    let mut snr_drop = 0.0f64;
    let gamma = scenario.config.gamma;
    let mu = scenario.config.mu;
    for i in 0..n_realizations {
        let r = scenario.sample(&mut RandomStream::for_sample(seed, i as u64));
        let out = design_max_snr(&r, scenario, &proposed, AlternatingSettings::MAX_SNR)?;
        trace_drop = trace_drop.max(trace_violation(&out.trace)).max(out.max_regression);
        let base = instantaneous_snr(&proposed.f, &proposed.psi, &r, gamma, mu)?;
        snr_drop = snr_drop.max(violation(base, out.objective()));
    }
    Ok(vec![
        CheckResult {
            name: "exact(max-mean-snr) >= exact(proposed)",
            worst: violation(exact, mean_value),
            tolerance: ORDERING_SLACK,
        },
        CheckResult {
            name: "exact(proposed) >= lower bound(proposed)",
            worst: violation(bound, exact),
            tolerance: ORDERING_SLACK,
        },
        CheckResult {
            name: "alternating objectives nondecreasing",
            worst: trace_drop,
            tolerance: IDENTITY_TOLERANCE,
        },
        CheckResult {
            name: "snr(max-snr) >= snr(proposed) per realization",
            worst: snr_drop,
            tolerance: 0.0,
        },
    ])
}

/// Relative amount by which `high` falls short of `low`.
fn violation(low: f64, high: f64) -> f64 {
    if high >= low {
        0.0
    } else {
        (low - high) / low.abs().max(f64::MIN_POSITIVE)
    }
}

fn trace_violation(trace: &[f64]) -> f64 {
    trace.windows(2).map(|w| violation(w[0], w[1])).fold(0.0, f64::max)
}
