//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use ris_core::analysis::{
    ergodic_capacity_analytical, integrate_with_breaks, marcum_q1, marcum_q1_pair, outage_analytical, rice_gain_stats,
    QuadratureSpec,
};
use ris_core::beamforming::eigen::{principal_eigenvector, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use ris_core::beamforming::{build_quadratic_form, compute_weights, design_proposed, Scheme};
use ris_core::channel::{link_budget_from_db, Scenario, SystemConfig};
use ris_core::exec::Parallelism;
use ris_core::experiments::{capacity_sweep, SweepAxis, SweepPoint};
use ris_core::invariants::{identity_checks, ordering_checks};
use ris_core::montecarlo::{
    simulate, validate_gain_distribution, validate_scatter_terms, GainFit, MeanEstimate, SimulationPlan,
};
use ris_core::rng::RandomStream;
use ris_core::Complex64;

const SEED: u64 = 20_240_601;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn default_beta_grid() -> Vec<f64> {
    (0..41).map(|i| 20.0 + 0.5 * i as f64).collect()
}

fn plan(n_samples: u64, beta_grid_db: Vec<f64>, schemes: Vec<Scheme>) -> SimulationPlan {
    SimulationPlan {
        n_samples,
        seed: SEED,
        beta_grid_db,
        schemes,
    }
}

fn defaults() -> Scenario {
    Scenario::new(SystemConfig::default()).expect("default scenario")
}

/// Random but well-posed system configurations.
fn random_configs(count: usize, seed: u64) -> Vec<SystemConfig> {
    (0..count)
        .map(|i| {
            let mut s = RandomStream::for_sample(seed, i as u64);
            let (gamma, mu) = link_budget_from_db(-10.0 + 20.0 * s.uniform(), -10.0 + 30.0 * s.uniform());
            SystemConfig {
                m: 1 + (s.uniform() * 8.0) as usize,
                n: 1 + (s.uniform() * 64.0) as usize,
                k: 0.2 + 20.0 * s.uniform(),
                theta_dd: PI * (2.0 * s.uniform() - 1.0),
                theta_di1: PI * (2.0 * s.uniform() - 1.0),
                theta_di2: PI * (2.0 * s.uniform() - 1.0),
                theta_ai1: PI * (2.0 * s.uniform() - 1.0),
                gamma,
                mu,
            }
        })
        .collect()
}

fn outage_agreement() -> Outcome {
    let sc = defaults();
    let sol = design_proposed(&sc).unwrap();
    let stats = rice_gain_stats(&sol, &sc).unwrap();
    let grid = default_beta_grid();
    let mc = simulate(
        &plan(1_000_000, grid.clone(), vec![Scheme::Proposed]),
        &sc,
        Parallelism::Auto,
    )
    .unwrap();
    let est = mc.scheme(Scheme::Proposed).unwrap();
    let mut worst = (0.0f64, 0.0);
    for (beta_db, o) in grid.iter().zip(&est.outage) {
        let a = outage_analytical(10f64.powf(beta_db / 10.0), &stats, sc.config.gamma).unwrap();
        let d = (a - o.probability).abs();
        if d > worst.0 {
            worst = (d, *beta_db);
        }
    }
    outcome(
        worst.0 <= 0.005,
        format!(
            "max |analytical - MC| = {:.5} at {} dB (limit 0.005, 1e6 samples)",
            worst.0, worst.1
        ),
    )
}

fn gain_distribution() -> Outcome {
    let r = validate_gain_distribution(&defaults(), 100_000, SEED, Parallelism::Auto).unwrap();
    match r.fit {
        GainFit::Tested {
            ks_statistic,
            critical_value,
            passed,
        } => outcome(
            passed,
            format!("KS D = {ks_statistic:.5}, critical {critical_value:.5} (1%, 1e5 samples)"),
        ),
        GainFit::Degenerate { .. } => outcome(false, "unexpected degenerate gain at defaults"),
    }
}

fn scatter_term_moments() -> Outcome {
    let r = validate_scatter_terms(&defaults(), 100_000, SEED, Parallelism::Auto).unwrap();
    let detail = r
        .checks
        .iter()
        .map(|c| format!("{} err {:.2e}", c.name, c.error()))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(r.passed(), detail)
}

fn deterministic_identities() -> Outcome {
    let mut configs = vec![SystemConfig::default()];
    configs.extend(random_configs(9, SEED ^ 1));
    let mut worst = 0.0f64;
    let mut passed = true;
    for cfg in configs {
        let sc = Scenario::new(cfg).unwrap();
        for c in identity_checks(&sc, 1000, SEED).unwrap() {
            worst = worst.max(c.worst);
            passed &= c.passed();
        }
    }
    outcome(
        passed,
        format!("worst relative error {worst:.2e} over 10 configs x 1000 unit beams (limit 1e-9)"),
    )
}

fn optimality_ordering() -> Outcome {
    let mut configs = vec![SystemConfig::default()];
    configs.extend(random_configs(49, SEED ^ 2));
    let mut failures = 0;
    let mut worst = 0.0f64;
    for cfg in &configs {
        let sc = Scenario::new(cfg.clone()).unwrap();
        for c in ordering_checks(&sc, 20, SEED).unwrap() {
            worst = worst.max(c.worst);
            if !c.passed() {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!(
            "{} configs, {failures} violated checks, worst relative violation {worst:.2e}",
            configs.len()
        ),
    )
}

fn combined_se(a: MeanEstimate, b: MeanEstimate) -> f64 {
    (a.std_error.powi(2) + b.std_error.powi(2)).sqrt()
}

fn scheme_ordering() -> Outcome {
    let sc = defaults();
    let r = simulate(&plan(100_000, vec![], Scheme::ALL.to_vec()), &sc, Parallelism::Auto).unwrap();
    let ec = |s| r.scheme(s).unwrap().capacity;
    let (p, mm, ms) = (ec(Scheme::Proposed), ec(Scheme::MaxMeanSnr), ec(Scheme::MaxSnr));
    let below = r.maxsnr_below_proposed.unwrap();
    let ms_ok = ms.mean >= mm.mean - 2.0 * combined_se(ms, mm);
    let mm_ok = mm.mean >= p.mean - 2.0 * combined_se(mm, p);
    let gap = (mm.mean - p.mean) / mm.mean;
    outcome(
        below == 0 && ms_ok && mm_ok && gap.abs() <= 0.03,
        format!(
            "EC max-snr {:.4}, max-mean-snr {:.4}, proposed {:.4}; per-sample violations {below}; proposed gap {:.3}% (limit 3%)",
            ms.mean,
            mm.mean,
            p.mean,
            100.0 * gap
        ),
    )
}

fn sweep(axis: SweepAxis, values: &[f64], base: &SystemConfig, n: u64) -> Vec<SweepPoint> {
    capacity_sweep(
        base,
        axis,
        values,
        &plan(n, vec![], vec![Scheme::Proposed]),
        &QuadratureSpec::default(),
        Parallelism::Auto,
    )
    .unwrap()
}

fn trend_reproduction() -> Outcome {
    let base = SystemConfig::default();
    let by_n = sweep(SweepAxis::Elements, &[8.0, 16.0, 32.0, 64.0], &base, 1);
    let n_ok = by_n.windows(2).all(|w| w[1].analytical > w[0].analytical);

    let thetas: Vec<f64> = (0..=16).map(|i| i as f64 * PI / 32.0).collect();
    let by_theta = sweep(SweepAxis::Theta, &thetas, &base, 1);
    let ec: Vec<f64> = by_theta.iter().map(|p| p.analytical).collect();
    let max_at_zero = ec.iter().all(|&v| v <= ec[0]);
    let min_at_end = ec.iter().all(|&v| v >= ec[ec.len() - 1]);

    // Same seed at both γ so the two curves share their fading draws.
    let mus = [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0];
    let low = sweep(SweepAxis::MuDb, &mus, &base, 100_000);
    let high_cfg = SystemConfig {
        gamma: link_budget_from_db(10.0, 0.0).0,
        ..base
    };
    let high = sweep(SweepAxis::MuDb, &mus, &high_cfg, 100_000);
    let gap = |i: usize| {
        let a = low[i].empirical.scheme(Scheme::Proposed).unwrap().capacity;
        let b = high[i].empirical.scheme(Scheme::Proposed).unwrap().capacity;
        (b.mean - a.mean, combined_se(a, b))
    };
    let (ref_gap, ref_se) = gap(0);
    let mut worst_ratio = 0.0f64;
    for i in 1..mus.len() {
        let (g, se) = gap(i);
        worst_ratio = worst_ratio.max((g - ref_gap).abs() / (ref_se.powi(2) + se.powi(2)).sqrt());
    }
    let shift_ok = worst_ratio <= 3.0;
    outcome(
        n_ok && max_at_zero && min_at_end && shift_ok,
        format!(
            "EC over N {:?}: increasing {n_ok}; theta max at 0 {max_at_zero}, min at pi/2 {min_at_end}; \
             gamma shift {ref_gap:.4} bits, worst deviation {worst_ratio:.2} combined SE (limit 3)",
            by_n.iter().map(|p| format!("{:.3}", p.analytical)).collect::<Vec<_>>()
        ),
    )
}

/// Largest eigenvalue of `w1 a aᴴ + w2 b bᴴ` from its 2x2 Gram form.
fn rank_two_top_eigenvalue(w1: f64, a: &[Complex64], w2: f64, b: &[Complex64]) -> f64 {
    let p = w1 * a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let q = w2 * b.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let cross: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    0.5 * (p + q) + (0.25 * (p - q).powi(2) + w1 * w2 * cross.norm_sqr()).sqrt()
}

fn eigen_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for cfg in random_configs(1000, SEED ^ 3) {
        let sc = Scenario::new(cfg.clone()).unwrap();
        let w = compute_weights(&sc);
        let z = build_quadratic_form(&sc.los, w).z;
        let pair = principal_eigenvector(&z, DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        // a = (e₀)ᴴ and b = ḡ* written out from the array geometry.
        let a: Vec<Complex64> = (0..cfg.m)
            .map(|m| Complex64::from_polar(1.0, m as f64 * cfg.theta_di1))
            .collect();
        let b: Vec<Complex64> = (0..cfg.m)
            .map(|m| Complex64::from_polar(1.0, -(m as f64) * cfg.theta_dd))
            .collect();
        let oracle = rank_two_top_eigenvalue(w.w1, &a, w.w2, &b);
        worst = worst.max((pair.value - oracle).abs() / oracle);
    }
    outcome(
        worst <= 1e-10,
        format!("worst relative eigenvalue error {worst:.2e} over 1000 configs (limit 1e-10)"),
    )
}

/// `e^{−x} I₀(x)` by the trapezoid rule on `(1/2π) ∫ e^{x(cos θ − 1)} dθ`.
fn scaled_i0(x: f64) -> f64 {
    let points = 2048;
    (0..points)
        .map(|j| (x * ((2.0 * PI * j as f64 / points as f64).cos() - 1.0)).exp())
        .sum::<f64>()
        / points as f64
}

/// `Q₁(a, b)` by integrating the Rice density `x e^{−(x−a)²/2} Ĩ₀(ax)`.
fn marcum_oracle(a: f64, b: f64) -> f64 {
    let density = |x: f64| x * (-0.5 * (x - a) * (x - a)).exp() * scaled_i0(a * x);
    let top = a.max(b) + 40.0;
    let mut breaks = vec![b];
    if a > b {
        breaks.push(a);
    }
    breaks.push(top);
    let spec = QuadratureSpec {
        relative_tolerance: 1e-13,
        max_subdivisions: 5000,
        ..QuadratureSpec::default()
    };
    integrate_with_breaks(density, &breaks, &spec).unwrap().value
}

fn marcum_accuracy() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..20 {
        for j in 0..20 {
            let (a, b) = (0.5 * i as f64, 0.25 + 0.5 * j as f64);
            let q = marcum_q1_pair(a, b).unwrap();
            worst = worst.max((q.q - marcum_oracle(a, b)).abs());
        }
    }
    let mut special = 0.0f64;
    for i in 0..50 {
        let x = 0.2 * i as f64;
        special = special.max((marcum_q1(x, 0.0).unwrap() - 1.0).abs());
        special = special.max((marcum_q1(0.0, x).unwrap() - (-0.5 * x * x).exp()).abs());
    }
    outcome(
        worst <= 1e-10 && special <= 1e-12,
        format!("20x20 grid worst |error| {worst:.2e} (limit 1e-10); special values {special:.1e} (limit 1e-12)"),
    )
}

fn capacity_integral() -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for n in [32usize, 8, 64] {
        let sc = Scenario::new(SystemConfig {
            n,
            ..SystemConfig::default()
        })
        .unwrap();
        let stats = rice_gain_stats(&design_proposed(&sc).unwrap(), &sc).unwrap();
        let analytical = ergodic_capacity_analytical(&stats, sc.config.gamma, &QuadratureSpec::default()).unwrap();
        let mc = simulate(&plan(1_000_000, vec![], vec![Scheme::Proposed]), &sc, Parallelism::Auto).unwrap();
        let ec = mc.scheme(Scheme::Proposed).unwrap().capacity.mean;
        let rel = (analytical - ec).abs() / ec;
        passed &= rel <= 0.01;
        parts.push(format!("N={n}: {analytical:.4} vs {ec:.4} ({:.3}%)", 100.0 * rel));
    }
    outcome(passed, format!("{} (limit 1%, 1e6 samples)", parts.join("; ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("outage agreement", outage_agreement),
        ("gain distribution", gain_distribution),
        ("scatter-term moments", scatter_term_moments),
        ("deterministic identities", deterministic_identities),
        ("optimality ordering", optimality_ordering),
        ("scheme ordering", scheme_ordering),
        ("trend reproduction", trend_reproduction),
        ("eigen-solver oracle", eigen_oracle),
        ("marcum q1 accuracy", marcum_accuracy),
        ("capacity integral", capacity_integral),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        if !o.passed {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.1}s]",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
