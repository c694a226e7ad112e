//! Alternating baselines. Each half-step solves its subproblem exactly, so
//! the objective never decreases; iteration stops once the relative gain of
//! a full round drops below `tol`.

use super::eigen::{self, principal_eigenvector};
use super::{arg0, mean_snr_exact, BeamformerSolution, Scheme};
use crate::channel::{ChannelRealization, Scenario};
use crate::{CMatrix, CVector, Complex64, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternatingSettings {
    pub max_iters: usize,
    /// Relative objective improvement below which a round counts as converged.
    pub tol: f64,
}

impl AlternatingSettings {
    pub const MAX_MEAN_SNR: Self = Self {
        max_iters: 200,
        tol: 1e-8,
    };
    pub const MAX_SNR: Self = Self {
        max_iters: 50,
        tol: 1e-8,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternatingOutcome {
    pub solution: BeamformerSolution,
    /// Objective of the retained iterate: the initial value followed by its
    /// value after each round.
    pub trace: Vec<f64>,
    /// Largest relative amount by which a round's candidate fell below the
    /// best objective so far (0 when every round improved).
    pub max_regression: f64,
    pub iterations: usize,
    /// False when `max_iters` rounds ran without meeting `tol`.
    pub converged: bool,
}

impl AlternatingOutcome {
    pub fn objective(&self) -> f64 {
        *self.trace.last().expect("trace holds at least the initial value")
    }
}

/// Phases aligning every entry of `u` to the phase `target`.
fn align_phases(u: &CVector, target: f64) -> CVector {
    u.map(|z| Complex64::from_polar(1.0, target - arg0(z)))
}

/// Runs rounds of `step` (returning the candidate and its objective) from
/// `start`, keeping the best iterate.
fn alternate<S>(
    start: (CVector, CVector),
    start_value: f64,
    settings: AlternatingSettings,
    mut step: S,
) -> Result<Rounds>
where
    S: FnMut(&CVector) -> Result<(CVector, CVector, f64)>,
{
    let (mut f, mut psi) = start;
    let mut best = start_value;
    let mut trace = vec![start_value];
    let mut max_regression = 0.0f64;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < settings.max_iters {
        iterations += 1;
        let (f_new, psi_new, value) = step(&f)?;
        let gain = value - best;
        if value >= best {
            f = f_new;
            psi = psi_new;
            best = value;
        } else if best != 0.0 {
            max_regression = max_regression.max(-gain / best.abs());
        }
        trace.push(best);
        if gain <= settings.tol * best.abs() {
            converged = true;
            break;
        }
    }
    Ok(Rounds {
        f,
        psi,
        trace,
        iterations,
        converged,
        max_regression,
    })
}

struct Rounds {
    f: CVector,
    psi: CVector,
    trace: Vec<f64>,
    iterations: usize,
    converged: bool,
    max_regression: f64,
}

impl Rounds {
    fn into_outcome(self, scheme: Scheme) -> AlternatingOutcome {
        AlternatingOutcome {
            solution: BeamformerSolution {
                f: self.f,
                psi: self.psi,
                scheme,
            },
            trace: self.trace,
            iterations: self.iterations,
            converged: self.converged,
            max_regression: self.max_regression,
        }
    }
}

/// Alternating maximization of the exact mean SNR with statistical CSI.
///
/// Round: (a) phases co-phase `E f` with `ḡᵀf`; (b) `f` becomes the
/// principal eigenvector of `v vᴴ + κ_l²κ_n² H̄ᴴH̄` where
/// `vᴴ = κ_l² ψᵀE + μ κ_l ḡᵀ`.
pub fn design_max_mean_snr(
    scenario: &Scenario,
    init: &BeamformerSolution,
    settings: AlternatingSettings,
) -> Result<AlternatingOutcome> {
    let los = &scenario.los;
    let kl = scenario.kappa.kappa_l;
    let kn = scenario.kappa.kappa_n;
    let mu = scenario.config.mu;
    let scatter_gram = los.h_mat_bar.adjoint() * &los.h_mat_bar * Complex64::new(kl * kl * kn * kn, 0.0);
    let start_value = mean_snr_exact(&init.f, &init.psi, scenario)?;

    let step = |f: &CVector| -> Result<(CVector, CVector, f64)> {
        let psi = align_phases(&(&los.cascade * f), arg0(los.g_bar.dot(f)));
        // Row vector vᴴ, stored as a column of its entries.
        let row =
            los.cascade.transpose() * &psi * Complex64::new(kl * kl, 0.0) + &los.g_bar * Complex64::new(mu * kl, 0.0);
        let v = row.conjugate();
        let a: CMatrix = &v * v.adjoint() + &scatter_gram;
        let f_new = principal_eigenvector(&a, eigen::DEFAULT_TOL, eigen::DEFAULT_MAX_ITERS)?.vector;
        let value = mean_snr_exact(&f_new, &psi, scenario)?;
        Ok((f_new, psi, value))
    };

    let rounds = alternate((init.f.clone(), init.psi.clone()), start_value, settings, step)?;
    Ok(rounds.into_outcome(Scheme::MaxMeanSnr))
}

/// Alternating maximization of the instantaneous SNR for one realization
/// (perfect CSI).
///
/// Round: (a) phases co-phase `diag(h) H f` with `μ gᵀf`; (b) `f` is the
/// conjugate matched filter of the effective row `hᵀΦH + μ gᵀ`.
pub fn design_max_snr(
    realization: &ChannelRealization,
    scenario: &Scenario,
    init: &BeamformerSolution,
    settings: AlternatingSettings,
) -> Result<AlternatingOutcome> {
    let gamma = scenario.config.gamma;
    let mu = scenario.config.mu;
    // diag(h) · H
    let mut cascade = realization.h_mat.clone();
    for (mut row, h) in cascade.row_iter_mut().zip(realization.h.iter()) {
        row *= *h;
    }
    let start_value = super::instantaneous_snr(&init.f, &init.psi, realization, gamma, mu)?;

    let step = |f: &CVector| -> Result<(CVector, CVector, f64)> {
        let psi = align_phases(&(&cascade * f), arg0(realization.g.dot(f) * mu));
        let row = cascade.transpose() * &psi + &realization.g * Complex64::new(mu, 0.0);
        let norm = row.norm();
        let f_new = if norm > 0.0 {
            row.conjugate() / Complex64::new(norm, 0.0)
        } else {
            f.clone()
        };
        Ok((f_new, psi, gamma * norm * norm))
    };

    let rounds = alternate((init.f.clone(), init.psi.clone()), start_value, settings, step)?;
    Ok(rounds.into_outcome(Scheme::MaxSnr))
}
