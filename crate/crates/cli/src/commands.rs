//! Subcommand implementations. Each writes its artifact under the output
//! directory and returns a short human-readable summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ris_core::analysis::{rice_gain_stats, QuadratureSpec};
use ris_core::beamforming::{
    build_quadratic_form, compute_weights, design_proposed, lower_bound_mean_snr, mean_snr_exact,
};
use ris_core::channel::{link_budget_from_db, Scenario, SystemConfig};
use ris_core::exec::Parallelism;
use ris_core::experiments::{capacity_sweep, outage_experiment, SweepAxis};
use ris_core::invariants::{identity_checks, ordering_checks};
use ris_core::montecarlo::{validate_gain_distribution, validate_scatter_terms, GainFit, SimulationPlan};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::output::{fmt_f64, outage_rows, sweep_row, write_csv, SolutionFile, OUTAGE_COLUMNS, SWEEP_COLUMNS};

/// Largest tolerated `‖f‖ − 1` or `|ψ_k| − 1` in a written solution.
const CONSTRAINT_TOLERANCE: f64 = 1e-9;
const IDENTITY_VECTORS: usize = 1000;
const ORDERING_REALIZATIONS: usize = 20;

/// A validated configuration plus run-level settings.
#[derive(Debug, Clone)]
pub struct Run {
    pub config: ExperimentConfig,
    pub out_dir: PathBuf,
    pub parallelism: Parallelism,
}

impl Run {
    pub fn new(config: ExperimentConfig, out_dir: PathBuf, parallelism: Parallelism) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            out_dir,
            parallelism,
        })
    }

    fn output_path(&self, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out_dir).map_err(|e| CliError::io(&self.out_dir, e))?;
        Ok(self.out_dir.join(name))
    }

    fn system(&self) -> Result<SystemConfig> {
        self.config.system_config()
    }

    fn plan(&self, n_samples: u64, beta_grid_db: Vec<f64>) -> Result<SimulationPlan> {
        Ok(SimulationPlan {
            n_samples,
            seed: self.config.simulation.seed,
            beta_grid_db,
            schemes: self.config.schemes()?,
        })
    }
}

pub fn design(run: &Run) -> Result<String> {
    let scenario = Scenario::new(run.system()?)?;
    let solution = design_proposed(&scenario)?;
    let violation = solution.constraint_violation();
    if violation > CONSTRAINT_TOLERANCE {
        return Err(CliError::Constraint(violation));
    }
    let form = build_quadratic_form(&scenario.los, compute_weights(&scenario));
    let stats = rice_gain_stats(&solution, &scenario)?;
    let file = SolutionFile {
        f: solution.f.clone(),
        psi: solution.psi.clone(),
        scalars: vec![
            ("objective_fhzf".into(), form.value(&solution.f)),
            (
                "mean_snr_exact".into(),
                mean_snr_exact(&solution.f, &solution.psi, &scenario)?,
            ),
            (
                "mean_snr_lower_bound".into(),
                lower_bound_mean_snr(&solution.f, &scenario)?,
            ),
            ("nu".into(), stats.nu),
            ("sigma".into(), stats.sigma),
        ],
    };
    let path = run.output_path("solution.txt")?;
    std::fs::write(&path, file.render()).map_err(|e| CliError::io(&path, e))?;

    let mut summary = format!("wrote {}\n", path.display());
    for (key, v) in &file.scalars {
        let _ = writeln!(summary, "  {key:<22} {}", fmt_f64(*v));
    }
    let _ = write!(summary, "  {:<22} {:e}", "constraint_violation", violation);
    Ok(summary)
}

pub fn outage(run: &Run) -> Result<String> {
    let grid = run.config.beta_grid_db()?;
    let plan = run.plan(run.config.simulation.outage_samples, grid.clone())?;
    let exp = outage_experiment(&run.system()?, &plan, run.parallelism)?;
    let path = run.output_path("outage.csv")?;
    write_csv(
        &path,
        &OUTAGE_COLUMNS,
        &outage_rows(&grid, &exp.analytical, &exp.empirical),
    )?;

    let mut summary = format!(
        "wrote {} ({} thresholds, {} samples)\n  nu = {}, sigma = {}",
        path.display(),
        grid.len(),
        plan.n_samples,
        fmt_f64(exp.stats.nu),
        fmt_f64(exp.stats.sigma)
    );
    if let Some(est) = exp.empirical.scheme(ris_core::beamforming::Scheme::Proposed) {
        let worst = exp
            .analytical
            .iter()
            .zip(&est.outage)
            .map(|(a, o)| (a - o.probability).abs())
            .fold(0.0, f64::max);
        let _ = write!(summary, "\n  max |analytical - MC proposed| = {worst:.5}");
    }
    Ok(summary)
}

fn write_sweep(run: &Run, base: &SystemConfig, axis: SweepAxis, values: &[f64], name: &str) -> Result<PathBuf> {
    let plan = run.plan(run.config.simulation.sweep_samples, vec![])?;
    let points = capacity_sweep(base, axis, values, &plan, &QuadratureSpec::default(), run.parallelism)?;
    let rows: Vec<_> = points
        .iter()
        .map(|p| sweep_row(p.value, p.analytical, &p.empirical))
        .collect();
    let path = run.output_path(name)?;
    write_csv(&path, &SWEEP_COLUMNS, &rows)?;
    Ok(path)
}

/// Capacity sweep over `axis`. The μ sweep also writes one file per extra
/// γ value.
pub fn capacity(run: &Run, axis: SweepAxis) -> Result<String> {
    let base = run.system()?;
    let mut written = Vec::new();
    match axis {
        SweepAxis::Elements => {
            written.push(write_sweep(
                run,
                &base,
                axis,
                &run.config.n_values()?,
                "capacity_vs_n.csv",
            )?);
        }
        SweepAxis::Theta => {
            written.push(write_sweep(
                run,
                &base,
                axis,
                &run.config.theta_grid_rad()?,
                "capacity_vs_theta.csv",
            )?);
        }
        SweepAxis::MuDb => {
            let mus = run.config.sweep.mu_db_values.clone();
            written.push(write_sweep(run, &base, axis, &mus, "capacity_vs_mu.csv")?);
            for &g in &run.config.sweep.mu_extra_gamma_db {
                let cfg = SystemConfig {
                    gamma: link_budget_from_db(g, 0.0).0,
                    ..base.clone()
                };
                written.push(write_sweep(run, &cfg, axis, &mus, &mu_file_name(g))?);
            }
        }
    }
    Ok(written
        .iter()
        .map(|p| format!("wrote {}", p.display()))
        .collect::<Vec<_>>()
        .join("\n"))
}

pub fn mu_file_name(gamma_db: f64) -> String {
    format!("capacity_vs_mu_gamma_{gamma_db}db.csv")
}

/// One line of the validation report.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

fn line(report: &mut Vec<(Verdict, String)>, passed: bool, text: String) {
    report.push((if passed { Verdict::Pass } else { Verdict::Fail }, text));
}

pub fn validate(run: &Run) -> Result<String> {
    let scenario = Scenario::new(run.system()?)?;
    let n = run.config.simulation.validate_samples;
    let seed = run.config.simulation.seed;
    let mut report = Vec::new();

    let gain = validate_gain_distribution(&scenario, n, seed, run.parallelism)?;
    match gain.fit {
        GainFit::Tested {
            ks_statistic,
            critical_value,
            passed,
        } => line(
            &mut report,
            passed,
            format!("gain distribution: KS D = {ks_statistic:e}, critical value = {critical_value:e}, n = {n}"),
        ),
        GainFit::Degenerate { max_abs_deviation } => report.push((
            Verdict::Skip,
            format!(
                "gain distribution: no scattered power, gain is the constant nu = {} (max deviation {max_abs_deviation:e}); Rice fit not applicable",
                fmt_f64(gain.stats.nu)
            ),
        )),
    }

    let terms = validate_scatter_terms(&scenario, n, seed, run.parallelism)?;
    for c in &terms.checks {
        line(
            &mut report,
            c.passed(),
            format!(
                "{}: measured = {}, expected = {}, error = {:e} ({} tolerance {:e})",
                c.name,
                fmt_f64(c.measured),
                fmt_f64(c.expected),
                c.error(),
                if c.relative { "relative" } else { "absolute" },
                c.tolerance
            ),
        );
    }

    let checks = identity_checks(&scenario, IDENTITY_VECTORS, seed)?
        .into_iter()
        .chain(ordering_checks(&scenario, ORDERING_REALIZATIONS, seed)?);
    for c in checks {
        line(
            &mut report,
            c.passed(),
            format!("{}: worst = {:e}, tolerance = {:e}", c.name, c.worst, c.tolerance),
        );
    }

    let text: String = report
        .iter()
        .map(|(v, t)| {
            let tag = match v {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Skip => "SKIP",
            };
            format!("{tag} {t}\n")
        })
        .collect();
    let path = run.output_path("validation_report.txt")?;
    std::fs::write(&path, &text).map_err(|e| CliError::io(&path, e))?;
    print!("{text}");

    let failed = report.iter().filter(|(v, _)| *v == Verdict::Fail).count();
    if failed > 0 {
        return Err(CliError::ValidationFailed { failed });
    }
    Ok(format!("wrote {}", path.display()))
}

/// Reads a solution file written by [`design`].
pub fn read_solution(path: &Path) -> Result<SolutionFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    SolutionFile::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
