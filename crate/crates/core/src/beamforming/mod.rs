//! Transmit beamformer and RIS phase design.
//!
//! The proposed scheme maximizes a lower bound on the mean SNR. With the
//! phase vector aligned to a given beam `f`, the exact mean SNR reduces to
//!
//! ```text
//! γ (w1 |e₀f|² + w2 |ḡᵀf|² + w3 |e₀f| |ḡᵀf| + c)
//! ```
//!
//! Dropping the nonnegative cross term leaves the Rayleigh quotient
//! `fᴴ Z f` with `Z = w1 e₀ᴴe₀ + w2 ḡ*ḡᵀ`, whose maximizer is the principal
//! eigenvector of `Z`.

mod alternating;
pub mod eigen;

pub use alternating::{design_max_mean_snr, design_max_snr, AlternatingOutcome, AlternatingSettings};
pub use eigen::{principal_eigenvector, EigenPair};

use std::fmt;

use crate::channel::{ChannelRealization, LosComponents, RicianCoefficients, Scenario};
use crate::{CMatrix, CVector, Complex64, Error, Result};

/// Below this magnitude a complex scalar is treated as zero.
const ZERO_BEAM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Closed-form maximizer of the mean-SNR lower bound.
    Proposed,
    /// Alternating maximization of the exact mean SNR (statistical CSI).
    MaxMeanSnr,
    /// Alternating maximization of the instantaneous SNR (perfect CSI).
    MaxSnr,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Proposed, Scheme::MaxMeanSnr, Scheme::MaxSnr];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::MaxMeanSnr => "max-mean-snr",
            Scheme::MaxSnr => "max-snr",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

pub fn compute_weights(scenario: &Scenario) -> ObjectiveWeights {
    weights_for(scenario.config.n, scenario.config.mu, scenario.kappa)
}

pub fn weights_for(n: usize, mu: f64, kappa: RicianCoefficients) -> ObjectiveWeights {
    let n = n as f64;
    let RicianCoefficients {
        kappa_l: kl,
        kappa_n: kn,
    } = kappa;
    ObjectiveWeights {
        w1: n * n * kl.powi(4) + n * kl * kl * kn * kn,
        w2: mu * mu * kl * kl,
        w3: 2.0 * n * mu * kl.powi(3),
    }
}

/// The Hermitian PSD matrix `Z` of the lower-bound objective `fᴴZf`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub z: CMatrix,
}

impl QuadraticForm {
    pub fn value(&self, f: &CVector) -> f64 {
        f.dotc(&(&self.z * f)).re
    }
}

pub fn build_quadratic_form(los: &LosComponents, weights: ObjectiveWeights) -> QuadraticForm {
    let e0 = los.cascade_row();
    let g = &los.g_bar;
    // e₀ᴴe₀ and ḡ*ḡᵀ as column-times-row outer products.
    let cascade_part = e0.conjugate() * e0.transpose();
    let direct_part = g.conjugate() * g.transpose();
    QuadraticForm {
        z: cascade_part * Complex64::new(weights.w1, 0.0) + direct_part * Complex64::new(weights.w2, 0.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSolution {
    /// Unit-norm transmit beamformer, length M.
    pub f: CVector,
    /// Unit-modulus RIS phases, length N.
    pub psi: CVector,
    pub scheme: Scheme,
}

impl BeamformerSolution {
    /// Largest violation of `‖f‖ = 1` and `|ψ_k| = 1`.
    pub fn constraint_violation(&self) -> f64 {
        let norm_err = (self.f.norm() - 1.0).abs();
        self.psi.iter().map(|z| (z.norm() - 1.0).abs()).fold(norm_err, f64::max)
    }
}

/// Phase of `z`, with `arg(0) = 0`.
pub(crate) fn arg0(z: Complex64) -> f64 {
    if z == Complex64::new(0.0, 0.0) {
        0.0
    } else {
        z.arg()
    }
}

/// RIS phases that co-phase the cascade path with the direct LoS path for
/// the beam `f`: `ψᵀ = (N|e₀f| / |ḡᵀf|) (ḡᵀf) w` with `w` the pseudoinverse
/// of `E f`.
///
/// When `ḡᵀf` vanishes the direct term carries no phase, and the cascade is
/// aligned to zero phase instead.
pub fn phase_shift_for(f: &CVector, los: &LosComponents) -> Result<CVector> {
    check_len("beamformer", los.m(), f.len())?;
    let ef = &los.cascade * f;
    let ef_norm_sq = ef.norm_squared();
    if ef_norm_sq.sqrt() <= ZERO_BEAM {
        return Err(Error::DegenerateBeam(
            "E f = 0: the beam is orthogonal to the RIS cascade",
        ));
    }
    let gf = los.g_bar.dot(f);
    if gf.norm() <= ZERO_BEAM {
        return Ok(ef.map(|z| Complex64::from_polar(1.0, -arg0(z))));
    }
    let e0f = los.cascade_row().dot(f).norm();
    let n = los.n() as f64;
    let c = Complex64::new(n * e0f / gf.norm(), 0.0) * gf;
    Ok(ef.map(|z| c * z.conj() / ef_norm_sq))
}

pub fn design_proposed(scenario: &Scenario) -> Result<BeamformerSolution> {
    if scenario.kappa.kappa_l == 0.0 {
        return Err(Error::NoLineOfSight);
    }
    let form = build_quadratic_form(&scenario.los, compute_weights(scenario));
    let eig = principal_eigenvector(&form.z, eigen::DEFAULT_TOL, eigen::DEFAULT_MAX_ITERS)?;
    let psi = phase_shift_for(&eig.vector, &scenario.los)?;
    Ok(BeamformerSolution {
        f: eig.vector,
        psi,
        scheme: Scheme::Proposed,
    })
}

fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, actual })
    }
}

/// Scattered-power terms of the mean SNR that do not depend on `(f, ψ)`,
/// divided by γ: `(κ_l²κ_n² + κ_n⁴) N + μ²κ_n²`.
fn constant_terms(scenario: &Scenario) -> f64 {
    let RicianCoefficients {
        kappa_l: kl,
        kappa_n: kn,
    } = scenario.kappa;
    let n = scenario.config.n as f64;
    let mu = scenario.config.mu;
    (kl * kl * kn * kn + kn.powi(4)) * n + mu * mu * kn * kn
}

/// Exact mean SNR `E[γ |hᵀΦHf + μ gᵀf|²]` over the Rician fading.
pub fn mean_snr_exact(f: &CVector, psi: &CVector, scenario: &Scenario) -> Result<f64> {
    let los = &scenario.los;
    check_len("beamformer", los.m(), f.len())?;
    check_len("phase vector", los.n(), psi.len())?;
    let RicianCoefficients {
        kappa_l: kl,
        kappa_n: kn,
    } = scenario.kappa;
    let mu = scenario.config.mu;
    let hf = &los.h_mat_bar * f;
    let cascade: Complex64 = los
        .h_bar
        .iter()
        .zip(psi.iter())
        .zip(hf.iter())
        .map(|((h, p), x)| h * p * x)
        .sum();
    let mean = cascade * (kl * kl) + los.g_bar.dot(f) * (mu * kl);
    let gamma = scenario.config.gamma;
    Ok(gamma * (mean.norm_sqr() + kl * kl * kn * kn * hf.norm_squared() + constant_terms(scenario)))
}

/// `γ (fᴴZf + (κ_l²κ_n² + κ_n⁴) N + μ²κ_n²)`.
pub fn lower_bound_mean_snr(f: &CVector, scenario: &Scenario) -> Result<f64> {
    check_len("beamformer", scenario.los.m(), f.len())?;
    let form = build_quadratic_form(&scenario.los, compute_weights(scenario));
    Ok(scenario.config.gamma * (form.value(f) + constant_terms(scenario)))
}

/// `γ |hᵀ diag(ψ) H f + μ gᵀf|²` for one realization.
pub fn instantaneous_snr(
    f: &CVector,
    psi: &CVector,
    realization: &ChannelRealization,
    gamma: f64,
    mu: f64,
) -> Result<f64> {
    check_len("beamformer", realization.g.len(), f.len())?;
    check_len("phase vector", realization.h.len(), psi.len())?;
    check_len("cascade rows", realization.h.len(), realization.h_mat.nrows())?;
    let hf = &realization.h_mat * f;
    let cascade: Complex64 = realization
        .h
        .iter()
        .zip(psi.iter())
        .zip(hf.iter())
        .map(|((h, p), x)| h * p * x)
        .sum();
    Ok(gamma * (cascade + realization.g.dot(f) * mu).norm_sqr())
}
