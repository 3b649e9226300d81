use std::fs;
use std::path::Path;

use cbf_core::operators::Regime;
use cbf_core::solver::{run, SolverConfig};
use cbf_core::verification::*;
use cbf_core::{CbfError, CheckReport, Grid, Params};

use crate::config::RunConfig;
use crate::error::CliError;

/// Every check the verify command knows, in report order.
pub const CHECKS: [&str; 15] = [
    "trilinear",
    "monotonicity_r_gt_3",
    "monotonicity_r3",
    "local_bound_2d",
    "c_monotone",
    "pointwise_monotone",
    "identity_3",
    "interpolation",
    "b_bounds",
    "sobolev_ratios",
    "filter_props",
    "gronwall",
    "continuous_dependence",
    "apriori_bound",
    "regularity_bound",
];

/// Checks whose hypotheses hold for the configured parameters.
pub fn default_checks(cfg: &RunConfig, params: &Params) -> Vec<&'static str> {
    let regime = params.regime();
    CHECKS
        .iter()
        .copied()
        .filter(|name| match *name {
            "monotonicity_r_gt_3" => regime == Regime::Supercritical,
            "monotonicity_r3" => params.r == 3.0,
            "local_bound_2d" => cfg.grid.dim == 2,
            "identity_3" | "b_bounds" | "continuous_dependence" => params.r >= 3.0,
            "regularity_bound" => matches!(regime, Regime::Supercritical | Regime::CriticalMonotone),
            _ => true,
        })
        .collect()
}

fn error_report(name: &str, err: &CbfError) -> CheckReport {
    CheckReport {
        name: name.to_string(),
        samples: 0,
        worst_margin: f64::NEG_INFINITY,
        worst_case_seed: 0,
        tolerance: 0.0,
        passed: false,
        exploratory: false,
        notes: vec![format!("error: {err}")],
        details: Vec::new(),
    }
}

struct Context<'a> {
    cfg: &'a RunConfig,
    params: Params,
    sampler: FieldSampler<f64>,
    seed: u64,
}

impl Context<'_> {
    fn trajectory_config(&self, extended: bool) -> Result<SolverConfig<f64>, CliError> {
        Ok(self.cfg.solver_config()?.with_extended_diagnostics(extended))
    }

    fn run_check(&self, name: &str) -> Result<CheckReport, CliError> {
        let v = &self.cfg.verify;
        let n = v.samples;
        let p = &self.params;
        let s = &self.sampler;
        let report = match name {
            "trilinear" => check_trilinear(s, n)?,
            "monotonicity_r_gt_3" => check_monotonicity_r_gt_3(s, p, n)?,
            "monotonicity_r3" => check_monotonicity_r3(s, p, n)?,
            "local_bound_2d" => check_local_bound_2d(s, p.mu, n)?,
            "c_monotone" => check_c_monotone(s, p.r, n)?,
            "pointwise_monotone" => check_pointwise_monotone(self.seed, p.r, self.cfg.grid.dim, n)?,
            "identity_3" => {
                // Odd integer r makes |u|^{r-1} polynomial, so 2n resolves the
                // products exactly. Otherwise the weights are not smooth, and
                // below r = 3 the weight |u|^{r-3} is singular at zeros of u.
                let odd = p.r.fract() == 0.0 && p.r % 2.0 == 1.0;
                let factor = if odd {
                    2
                } else if p.r >= 3.0 {
                    4
                } else {
                    8
                };
                let grid = Grid::new(self.cfg.grid.dim, factor * v.n, self.cfg.grid.length)?;
                let fine = FieldSampler::new(&grid, self.seed, (v.band_limit / 2).max(1))?.with_slope(v.slope);
                check_identity_3(&fine, p.r, n)?
            }
            "interpolation" => {
                let [a, b, c] = v.interpolation;
                check_interpolation(s, a, b, c, n)?
            }
            "b_bounds" => check_b_bounds(s, p.r, n)?,
            "sobolev_ratios" => report_sobolev_ratios(s, p.r, n)?,
            "filter_props" => check_filter_props(s, &v.filter_n, n)?,
            "gronwall" => check_gronwall_synthetic(self.seed, n.min(20), 1.0, 20001)?,
            "continuous_dependence" => {
                let grid = self.cfg.grid()?;
                let ic = self.cfg.initial_field(&grid)?;
                let delta = cbf_core::solver::random_band_limited(
                    &grid,
                    self.seed,
                    self.cfg.ic.band_limit.min(grid.n_points() / 2 - 1),
                    v.slope,
                    1.0,
                    true,
                )?;
                let delta = delta.scale(v.perturbation / delta.norm_h());
                let forcing = self.cfg.forcing(&grid)?;
                check_continuous_dependence(p, &self.trajectory_config(false)?, &ic, &delta, &forcing)?
            }
            "apriori_bound" | "regularity_bound" => {
                let grid = self.cfg.grid()?;
                let ic = self.cfg.initial_field(&grid)?;
                let forcing = self.cfg.forcing(&grid)?;
                let out = run(&ic, p, &self.trajectory_config(true)?, &forcing)?.into_result()?;
                if name == "apriori_bound" {
                    check_apriori_bound(&out.diagnostics, p, &ic, &forcing)?
                } else {
                    let theta = v.theta.unwrap_or_else(|| default_theta(p));
                    check_regularity_bound_with_theta(&out.diagnostics, p, &ic, &forcing, theta)?
                }
            }
            other => return Err(CliError::Config(format!("verify.checks: unknown check {other:?}"))),
        };
        Ok(match v.tolerances.get(name) {
            Some(tol) => report.with_tolerance(*tol),
            None => report,
        })
    }
}

/// Runs the selected checks. Check-level errors (wrong regime, blow-up of a
/// trajectory) are reported as failed checks; the others still run.
pub fn run_checks(cfg: &RunConfig, seed: Option<u64>) -> Result<Vec<CheckReport>, CliError> {
    let params = cfg.params()?;
    let seed = seed.unwrap_or(cfg.verify.seed);
    let v = &cfg.verify;
    let grid = Grid::new(cfg.grid.dim, v.n, cfg.grid.length)?;
    let sampler = FieldSampler::new(&grid, seed, v.band_limit)?.with_slope(v.slope);
    let ctx = Context {
        cfg,
        params,
        sampler,
        seed,
    };
    let names: Vec<String> = if v.checks.is_empty() {
        default_checks(cfg, &params).into_iter().map(String::from).collect()
    } else {
        v.checks.clone()
    };
    let mut reports = Vec::with_capacity(names.len());
    for name in &names {
        match ctx.run_check(name) {
            Ok(r) => reports.push(r),
            Err(CliError::Core(e)) => reports.push(error_report(name, &e)),
            Err(e) => return Err(e),
        }
    }
    Ok(reports)
}

pub fn cmd_verify(cfg: &RunConfig, seed: Option<u64>, out: &Path) -> Result<(), CliError> {
    let reports = run_checks(cfg, seed)?;
    let text = CheckReport::render_all(&reports);
    print!("{text}");
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let path = out.join("verify_report.txt");
    fs::write(&path, &text).map_err(CliError::io(&path))?;
    let failed = reports.iter().filter(|r| !r.is_acceptable()).count();
    let exploratory = reports.iter().filter(|r| r.exploratory).count();
    println!(
        "\nsummary: {} checks, {failed} failed, {exploratory} exploratory",
        reports.len()
    );
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}
