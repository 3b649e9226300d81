use std::fs;
use std::path::Path;

use cbf_core::solver::{taylor_green_exact, write_diagnostics, write_snapshot, RunOutcome, RunOutput, Solver};
use cbf_core::spectral::snapshot::{self, SnapshotHeader};
use cbf_core::{CbfError, Params};

use crate::config::RunConfig;
use crate::error::CliError;

fn header(cfg: &RunConfig, params: &Params, t: f64) -> SnapshotHeader {
    SnapshotHeader {
        dim: cfg.grid.dim as u64,
        n_points: cfg.grid.n as u64,
        period: cfg.grid.length,
        time: t,
        r: params.r,
        mu: params.mu,
        alpha: params.alpha,
        beta: params.beta,
    }
}

/// Runs the configured simulation and writes the effective config,
/// diagnostics table and snapshots into `out`.
pub fn execute(cfg: &RunConfig, out: &Path) -> Result<RunOutput<f64>, CliError> {
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    let solver_config = cfg.solver_config()?;
    let ic = cfg.initial_field(&grid)?;
    let forcing = cfg.forcing(&grid)?;

    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let effective = out.join("effective_config.toml");
    fs::write(&effective, cfg.to_toml()).map_err(CliError::io(&effective))?;

    let solver = Solver::new(&grid, params, solver_config, forcing)?;
    let output = solver.run(&ic)?;
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    write_diagnostics(&output.diagnostics, &out.join("diagnostics.tsv"))?;
    for (i, (t, u)) in output.snapshots.iter().enumerate() {
        snapshot::write_snapshot(&out.join(format!("snapshot_{i:05}.snap")), &header(cfg, &params, *t), u)?;
    }
    write_snapshot(&output.final_state, &params, &out.join("final.snap"))?;
    Ok(output)
}

fn summarize(output: &RunOutput<f64>) {
    let last = output.diagnostics.last().expect("at least the initial sample");
    let max_residual = output
        .diagnostics
        .windows(2)
        .map(|w| (w[1].energy_residual - w[0].energy_residual).abs())
        .fold(0.0, f64::max);
    println!("t = {:.6e}", last.t);
    println!("energy = {:.6e}", last.energy);
    println!("int_dissipation = {:.6e}", last.int_dissipation);
    println!("int_damping = {:.6e}", last.int_damping);
    println!("int_forcing = {:.6e}", last.int_forcing);
    println!("cumulative_energy_residual = {:.6e}", last.energy_residual);
    println!("max_interval_residual = {max_residual:.6e}");
}

fn finish(output: RunOutput<f64>) -> Result<RunOutput<f64>, CliError> {
    summarize(&output);
    if let RunOutcome::BlowUp {
        last_valid_time,
        reason,
    } = &output.outcome
    {
        return Err(CbfError::BlowUp {
            last_valid_time: *last_valid_time,
            reason: reason.clone(),
        }
        .into());
    }
    Ok(output)
}

pub fn cmd_run(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    finish(execute(cfg, out)?).map(|_| ())
}

/// The canned Taylor–Green run, compared with the exact decay at the end.
pub fn cmd_taylor_green(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let output = finish(execute(cfg, out)?)?;
    let grid = cfg.grid()?;
    let t = output.final_state.t;
    let exact = taylor_green_exact(&grid, cfg.ic.amplitude, cfg.params.mu, t)?;
    let err = output.final_state.u.to_physical()?.max_abs_diff(&exact)? / exact.max_abs();
    println!("max_relative_error_vs_exact = {err:.6e}");
    Ok(())
}
