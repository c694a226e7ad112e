//! Line-of-sight geometry, Rician weights and fading realizations.
//!
//! Index conventions: transmit antennas `m = 0..M`, RIS elements
//! `n = 0..N`. All LoS entries are unit-modulus phasors:
//!
//! ```text
//! g_bar[m]    = exp( j m θ_DD)
//! H_bar[n][m] = exp( j (n θ_AI1 − m θ_DI1))
//! h_bar[n]    = exp(−j n θ_DI2)
//! E           = diag(h_bar) · H_bar
//! ```

use std::f64::consts::PI;

use crate::rng::RandomStream;
use crate::{CMatrix, CVector, Complex64, Error, Result};

/// Scenario parameters. Angles in radians, `gamma` and `mu` linear.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Transmit antennas.
    pub m: usize,
    /// RIS elements.
    pub n: usize,
    /// Rician factor (linear). `f64::INFINITY` selects the LoS-only channel.
    pub k: f64,
    pub theta_dd: f64,
    pub theta_di1: f64,
    pub theta_di2: f64,
    pub theta_ai1: f64,
    /// Indirect-link SNR scale.
    pub gamma: f64,
    /// Direct/indirect amplitude ratio.
    pub mu: f64,
}

impl Default for SystemConfig {
    /// M = 4, N = 32, K = 5, θ_DD = 0, θ_DI1 = π/4, θ_DI2 = 8π/5, θ_AI1 = 0,
    /// γ = 0 dB, μ = 5 dB.
    fn default() -> Self {
        let (gamma, mu) = link_budget_from_db(0.0, 5.0);
        Self {
            m: 4,
            n: 32,
            k: 5.0,
            theta_dd: 0.0,
            theta_di1: PI / 4.0,
            theta_di2: 8.0 * PI / 5.0,
            theta_ai1: 0.0,
            gamma,
            mu,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid("m", "at least one transmit antenna is required"));
        }
        if self.n == 0 {
            return Err(Error::invalid("n", "at least one RIS element is required"));
        }
        if self.k.is_nan() || self.k < 0.0 {
            return Err(Error::invalid("k", format!("must be >= 0, got {}", self.k)));
        }
        for (name, v) in [
            ("theta_dd", self.theta_dd),
            ("theta_di1", self.theta_di1),
            ("theta_di2", self.theta_di2),
            ("theta_ai1", self.theta_ai1),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::invalid(
                "gamma",
                format!("must be finite and > 0, got {}", self.gamma),
            ));
        }
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(Error::invalid(
                "mu",
                format!("must be finite and >= 0, got {}", self.mu),
            ));
        }
        Ok(())
    }
}

/// LoS and scatter amplitude weights `(κ_l, κ_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianCoefficients {
    pub kappa_l: f64,
    pub kappa_n: f64,
}

impl RicianCoefficients {
    /// The `K → ∞` limit: no scattered component.
    pub fn los_only() -> Self {
        Self {
            kappa_l: 1.0,
            kappa_n: 0.0,
        }
    }
}

pub fn rician_coefficients(k: f64) -> Result<RicianCoefficients> {
    if !k.is_finite() || k < 0.0 {
        return Err(Error::invalid("k", format!("must be finite and >= 0, got {k}")));
    }
    Ok(RicianCoefficients {
        kappa_l: (k / (1.0 + k)).sqrt(),
        kappa_n: (1.0 / (1.0 + k)).sqrt(),
    })
}

/// Converts dB inputs to linear `(γ, μ)`; both use `10^(x/10)`.
pub fn link_budget_from_db(gamma_db: f64, mu_db: f64) -> (f64, f64) {
    (10f64.powf(gamma_db / 10.0), 10f64.powf(mu_db / 10.0))
}

/// Deterministic LoS components of the three links.
#[derive(Debug, Clone, PartialEq)]
pub struct LosComponents {
    /// Direct link, length M.
    pub g_bar: CVector,
    /// Transmitter → RIS, N×M.
    pub h_mat_bar: CMatrix,
    /// RIS → receiver, length N.
    pub h_bar: CVector,
    /// Cascade `diag(h_bar) · H_bar`, N×M.
    pub cascade: CMatrix,
}

impl LosComponents {
    pub fn m(&self) -> usize {
        self.g_bar.len()
    }

    pub fn n(&self) -> usize {
        self.h_bar.len()
    }

    /// Row 0 of the cascade, `e₀`, as a column vector of length M.
    ///
    /// Every other row is `e₀` times a unit phasor, so `|e_n · f|` does not
    /// depend on `n`.
    pub fn cascade_row(&self) -> CVector {
        self.cascade.row(0).transpose()
    }
}

fn phasor(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

pub fn build_los(config: &SystemConfig) -> Result<LosComponents> {
    config.validate()?;
    let (m, n) = (config.m, config.n);
    let g_bar = CVector::from_fn(m, |i, _| phasor(i as f64 * config.theta_dd));
    let h_mat_bar = CMatrix::from_fn(n, m, |r, c| {
        phasor(r as f64 * config.theta_ai1 - c as f64 * config.theta_di1)
    });
    let h_bar = CVector::from_fn(n, |r, _| phasor(-(r as f64) * config.theta_di2));
    let cascade = CMatrix::from_fn(n, m, |r, c| h_bar[r] * h_mat_bar[(r, c)]);
    Ok(LosComponents {
        g_bar,
        h_mat_bar,
        h_bar,
        cascade,
    })
}

/// One fading draw `(g, H, h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub g: CVector,
    pub h_mat: CMatrix,
    pub h: CVector,
}

impl ChannelRealization {
    /// The realization with every scatter term set to zero and weight κ_l = 1.
    pub fn line_of_sight(los: &LosComponents) -> Self {
        Self {
            g: los.g_bar.clone(),
            h_mat: los.h_mat_bar.clone(),
            h: los.h_bar.clone(),
        }
    }

    pub fn compose(los: &LosComponents, kappa: RicianCoefficients, scatter: &ScatterDraw) -> Self {
        let mix = |bar: Complex64, tilde: Complex64| {
            if kappa.kappa_n == 0.0 {
                bar * kappa.kappa_l
            } else {
                bar * kappa.kappa_l + tilde * kappa.kappa_n
            }
        };
        Self {
            g: los.g_bar.zip_map(&scatter.g_tilde, mix),
            h_mat: los.h_mat_bar.zip_map(&scatter.h_mat_tilde, mix),
            h: los.h_bar.zip_map(&scatter.h_tilde, mix),
        }
    }
}

/// The zero-mean `CN(0, I)` scatter parts `(g̃, H̃, h̃)` of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterDraw {
    pub g_tilde: CVector,
    pub h_mat_tilde: CMatrix,
    pub h_tilde: CVector,
}

impl ScatterDraw {
    /// Draw order: g̃ (M entries), H̃ (row-major), h̃ (N entries).
    pub fn sample(m: usize, n: usize, stream: &mut RandomStream) -> Self {
        let g_tilde = CVector::from_fn(m, |_, _| stream.complex_normal());
        let mut h_mat_tilde = CMatrix::zeros(n, m);
        for r in 0..n {
            for c in 0..m {
                h_mat_tilde[(r, c)] = stream.complex_normal();
            }
        }
        let h_tilde = CVector::from_fn(n, |_, _| stream.complex_normal());
        Self {
            g_tilde,
            h_mat_tilde,
            h_tilde,
        }
    }
}

pub fn sample_channel(los: &LosComponents, kappa: RicianCoefficients, stream: &mut RandomStream) -> ChannelRealization {
    let scatter = ScatterDraw::sample(los.m(), los.n(), stream);
    ChannelRealization::compose(los, kappa, &scatter)
}

/// A validated configuration together with its derived quantities.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: SystemConfig,
    pub kappa: RicianCoefficients,
    pub los: LosComponents,
}

impl Scenario {
    pub fn new(config: SystemConfig) -> Result<Self> {
        config.validate()?;
        let kappa = if config.k == f64::INFINITY {
            RicianCoefficients::los_only()
        } else {
            rician_coefficients(config.k)?
        };
        let los = build_los(&config)?;
        Ok(Self { config, kappa, los })
    }

    pub fn sample(&self, stream: &mut RandomStream) -> ChannelRealization {
        sample_channel(&self.los, self.kappa, stream)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rician_examples() {
        let c = rician_coefficients(0.0).unwrap();
        assert_eq!((c.kappa_l, c.kappa_n), (0.0, 1.0));

        let c = rician_coefficients(5.0).unwrap();
        assert!((c.kappa_l - 0.912_870_929_175_276_8).abs() < 1e-15);
        assert!((c.kappa_n - 0.408_248_290_463_863).abs() < 1e-15);

        let c = rician_coefficients(1.0).unwrap();
        assert!((c.kappa_l - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((c.kappa_n - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rician_rejects_bad_k() {
        for k in [-1.0, f64::NAN, f64::INFINITY, f64::NEG_INFINITY] {
            assert!(matches!(
                rician_coefficients(k),
                Err(Error::InvalidParameter { name: "k", .. })
            ));
        }
    }

    #[test]
    fn link_budget_examples() {
        assert_eq!(link_budget_from_db(0.0, 0.0), (1.0, 1.0));
        let (g, m) = link_budget_from_db(0.0, 5.0);
        assert_eq!(g, 1.0);
        assert!((m - 3.162_277_660_168_379_5).abs() < 1e-14);
        let (g, m) = link_budget_from_db(10.0, 0.0);
        assert!((g - 10.0).abs() < 1e-14);
        assert_eq!(m, 1.0);
    }

    #[test]
    fn los_zero_index_and_examples() {
        let los = build_los(&SystemConfig::default()).unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(los.g_bar[0], one);
        assert_eq!(los.h_mat_bar[(0, 0)], one);
        assert_eq!(los.h_bar[0], one);
        // θ_DD = 0 ⇒ g_bar is all ones.
        assert!(los.g_bar.iter().all(|&z| z == one));

        let cfg = SystemConfig {
            theta_ai1: PI / 2.0,
            theta_di1: PI / 4.0,
            ..SystemConfig::default()
        };
        let los = build_los(&cfg).unwrap();
        assert!((los.h_mat_bar[(1, 1)] - phasor(PI / 4.0)).norm() < 1e-15);
    }

    #[test]
    fn h_bar_carries_negative_phase() {
        let cfg = SystemConfig {
            theta_di2: 0.3,
            ..SystemConfig::default()
        };
        let los = build_los(&cfg).unwrap();
        assert!((los.h_bar[2] - phasor(-0.6)).norm() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let bad = [
            SystemConfig {
                m: 0,
                ..SystemConfig::default()
            },
            SystemConfig {
                n: 0,
                ..SystemConfig::default()
            },
            SystemConfig {
                k: -1.0,
                ..SystemConfig::default()
            },
            SystemConfig {
                gamma: 0.0,
                ..SystemConfig::default()
            },
            SystemConfig {
                mu: -0.5,
                ..SystemConfig::default()
            },
            SystemConfig {
                theta_di1: f64::NAN,
                ..SystemConfig::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        let los_only = SystemConfig {
            k: f64::INFINITY,
            ..SystemConfig::default()
        };
        let sc = Scenario::new(los_only).unwrap();
        assert_eq!(sc.kappa, RicianCoefficients::los_only());
    }

    #[test]
    fn los_only_realization_is_exact() {
        let sc = Scenario::new(SystemConfig {
            k: f64::INFINITY,
            ..SystemConfig::default()
        })
        .unwrap();
        let mut s = RandomStream::new(1);
        let r = sc.sample(&mut s);
        assert_eq!(r, ChannelRealization::line_of_sight(&sc.los));
    }

    #[test]
    fn identical_stream_identical_realization() {
        let sc = Scenario::new(SystemConfig::default()).unwrap();
        let a = sc.sample(&mut RandomStream::for_sample(9, 3));
        let b = sc.sample(&mut RandomStream::for_sample(9, 3));
        assert_eq!(a, b);
    }

    #[test]
    fn sample_moments() {
        let sc = Scenario::new(SystemConfig::default()).unwrap();
        let (kl, kn) = (sc.kappa.kappa_l, sc.kappa.kappa_n);
        let draws = 100_000;
        let mut stream = RandomStream::new(11);
        let m = sc.config.m;
        let mut g_sum = CVector::zeros(m);
        let mut h_var = 0.0;
        let mut h_pseudo = Complex64::new(0.0, 0.0);
        for _ in 0..draws {
            let r = sc.sample(&mut stream);
            g_sum += &r.g;
            let d = r.h_mat[(3, 2)] - sc.los.h_mat_bar[(3, 2)] * kl;
            h_var += d.norm_sqr();
            h_pseudo += d * d;
        }
        let nf = draws as f64;
        // Each complex mean has per-part standard error kn / sqrt(2 n). Eight
        // parts are compared, so 4 SE keeps the family-wise false alarm
        // rate near 5e-4.
        let se = kn / (2.0 * nf).sqrt();
        for i in 0..m {
            let err = g_sum[i] / nf - sc.los.g_bar[i] * kl;
            assert!(err.re.abs() < 4.0 * se && err.im.abs() < 4.0 * se, "{err}");
        }
        let var = h_var / nf;
        assert!((var / (kn * kn) - 1.0).abs() < 0.05, "{var}");
        assert!((h_pseudo / nf).norm() < 0.05 * kn * kn);
    }

    fn arb_config() -> impl Strategy<Value = SystemConfig> {
        (1usize..9, 1usize..40, 0.0f64..20.0, prop::array::uniform4(-PI..PI)).prop_map(|(m, n, k, a)| SystemConfig {
            m,
            n,
            k,
            theta_dd: a[0],
            theta_di1: a[1],
            theta_di2: a[2],
            theta_ai1: a[3],
            ..SystemConfig::default()
        })
    }

    proptest! {
        #[test]
        fn kappa_squares_sum_to_one(k in 0.0f64..1e6) {
            let c = rician_coefficients(k).unwrap();
            prop_assert!((c.kappa_l.powi(2) + c.kappa_n.powi(2) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn los_structure(cfg in arb_config()) {
            let los = build_los(&cfg).unwrap();
            for z in los.g_bar.iter().chain(los.h_mat_bar.iter()).chain(los.h_bar.iter()).chain(los.cascade.iter()) {
                prop_assert!((z.norm() - 1.0).abs() < 1e-12);
            }
            let e0 = los.cascade.row(0);
            for r in 0..cfg.n {
                let row = los.cascade.row(r);
                prop_assert!((row.norm() - (cfg.m as f64).sqrt()).abs() < 1e-12);
                // Rank one: row r = phase · row 0.
                let phase = row[0] / e0[0];
                prop_assert!((phase.norm() - 1.0).abs() < 1e-12);
                for c in 0..cfg.m {
                    prop_assert!((row[c] - phase * e0[c]).norm() < 1e-12);
                }
            }
        }
    }
}
