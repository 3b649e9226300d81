use std::fs;
use std::path::Path;

use cbf_core::convergence::{convergence_table, richardson_orders, write_table, ConvergenceRow};
use cbf_core::solver::{run, taylor_green_exact, total_abs_energy_residual, RunOutput};
use cbf_core::{CbfError, Grid, Params};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Metric {
    Error,
    Richardson,
    EnergyResidual,
}

impl Metric {
    fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "error" => Ok(Metric::Error),
            "richardson" => Ok(Metric::Richardson),
            "energy_residual" => Ok(Metric::EnergyResidual),
            other => Err(CliError::Config(format!(
                "convergence.metric: expected error, richardson or energy_residual, got {other:?}"
            ))),
        }
    }
}

fn require_taylor_green(cfg: &RunConfig) -> Result<(), CliError> {
    let p = &cfg.params;
    if cfg.ic.family != "taylor_green" || cfg.forcing.kind != "zero" || p.alpha != 0.0 || p.beta != 0.0 {
        return Err(CliError::Config(
            "convergence.metric: error needs the unforced taylor_green case with alpha = beta = 0".into(),
        ));
    }
    Ok(())
}

fn simulate(cfg: &RunConfig, grid: &Grid, params: &Params, dt: Option<f64>) -> Result<RunOutput<f64>, CliError> {
    let mut cfg = cfg.clone();
    if let Some(dt) = dt {
        cfg.solver.dt = dt;
    }
    let ic = cfg.initial_field(grid)?;
    let forcing = cfg.forcing(grid)?;
    Ok(run(&ic, params, &cfg.solver_config()?, &forcing)?.into_result()?)
}

fn tg_error(cfg: &RunConfig, grid: &Grid, out: &RunOutput<f64>) -> Result<f64, CliError> {
    let exact = taylor_green_exact(grid, cfg.ic.amplitude, cfg.params.mu, out.final_state.t)?;
    Ok(out.final_state.u.to_physical()?.max_abs_diff(&exact)? / exact.max_abs())
}

fn ladder_len(len: usize) -> Result<(), CliError> {
    if len < 3 {
        return Err(
            CbfError::InvalidArguments(format!("a convergence ladder needs at least 3 levels, got {len}")).into(),
        );
    }
    Ok(())
}

/// Time-step ladder at the configured resolution.
pub fn dt_ladder(cfg: &RunConfig) -> Result<Vec<ConvergenceRow<f64>>, CliError> {
    let metric = Metric::parse(&cfg.convergence.metric)?;
    let hs = &cfg.convergence.dt;
    ladder_len(hs.len())?;
    if metric == Metric::Error {
        require_taylor_green(cfg)?;
    }
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    let runs = hs
        .iter()
        .map(|dt| simulate(cfg, &grid, &params, Some(*dt)))
        .collect::<Result<Vec<_>, _>>()?;
    match metric {
        Metric::Error => {
            let errors = runs
                .iter()
                .map(|o| tg_error(cfg, &grid, o))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(convergence_table(hs, &errors)?)
        }
        Metric::EnergyResidual => {
            let errors: Vec<f64> = runs
                .iter()
                .map(|o| total_abs_energy_residual(&o.diagnostics, &params))
                .collect();
            Ok(convergence_table(hs, &errors)?)
        }
        Metric::Richardson => {
            // Differences of successive final energies; one row fewer than levels.
            let energies: Vec<f64> = runs
                .iter()
                .map(|o| o.diagnostics.last().map_or(0.0, |s| s.energy))
                .collect();
            let orders = richardson_orders(hs, &energies)?;
            Ok(energies
                .windows(2)
                .zip(hs)
                .enumerate()
                .map(|(i, (q, h))| ConvergenceRow {
                    h: *h,
                    error: (q[0] - q[1]).abs(),
                    order: i.checked_sub(1).map(|j| orders[j]),
                })
                .collect())
        }
    }
}

/// Resolution ladder at the configured time step; h = L/N.
pub fn n_ladder(cfg: &RunConfig) -> Result<Vec<ConvergenceRow<f64>>, CliError> {
    let metric = Metric::parse(&cfg.convergence.metric)?;
    let ns = &cfg.convergence.n;
    ladder_len(ns.len())?;
    let params = cfg.params()?;
    let mut hs = Vec::with_capacity(ns.len());
    let mut errors = Vec::with_capacity(ns.len());
    for &n in ns {
        let grid = Grid::new(cfg.grid.dim, n, cfg.grid.length)?;
        let out = simulate(cfg, &grid, &params, None)?;
        hs.push(cfg.grid.length / n as f64);
        errors.push(match metric {
            Metric::Error => {
                require_taylor_green(cfg)?;
                tg_error(cfg, &grid, &out)?
            }
            Metric::EnergyResidual => total_abs_energy_residual(&out.diagnostics, &params),
            Metric::Richardson => {
                return Err(CliError::Config(
                    "convergence.metric: richardson is only available for the dt ladder".into(),
                ))
            }
        });
    }
    Ok(convergence_table(&hs, &errors)?)
}

fn emit(rows: &[ConvergenceRow<f64>], label: &str, path: &Path) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_table(&mut buf, label, rows).map_err(CliError::io(path))?;
    print!("{}", String::from_utf8_lossy(&buf));
    fs::write(path, &buf).map_err(CliError::io(path))
}

pub fn cmd_convergence(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    if cfg.convergence.dt.is_empty() && cfg.convergence.n.is_empty() {
        return Err(CliError::Config("convergence: give a dt or n ladder".into()));
    }
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let mut orders = Vec::new();
    if !cfg.convergence.dt.is_empty() {
        let rows = dt_ladder(cfg)?;
        emit(&rows, "dt", &out.join("convergence_dt.tsv"))?;
        orders.extend(rows.iter().filter_map(|r| r.order));
    }
    if !cfg.convergence.n.is_empty() {
        let rows = n_ladder(cfg)?;
        emit(&rows, "h", &out.join("convergence_n.tsv"))?;
        orders.extend(rows.iter().filter_map(|r| r.order));
    }
    if let Some(min) = cfg.convergence.min_order {
        // NaN orders (exact zero errors) count as below the threshold.
        let below = orders.iter().filter(|o| !(**o >= min)).count();
        if below > 0 {
            eprintln!("{below} observed order(s) below {min}");
            return Err(CliError::ChecksFailed(below));
        }
    }
    Ok(())
}
