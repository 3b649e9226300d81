//! Time integration of the Galerkin-truncated CBF system with energy-budget
//! accounting.

mod config;
mod diagnostics;
mod forcing;
mod initial;
mod integrator;
mod state;

pub use config::{Scheme, SolverConfig, Truncation};
pub use diagnostics::{
    apriori_bound, energy_residual, total_abs_energy_residual, write_diagnostics, write_diagnostics_to,
    DiagnosticsSample, ExtendedDiagnostics, COLUMNS, EXTENDED_COLUMNS,
};
pub use forcing::{AnalyticForcing, ForcingSpec};
pub use initial::{random_band_limited, single_mode, taylor_green, taylor_green_exact, InitialCondition};
pub use integrator::{run, step, RunOutcome, RunOutput, Solver};
pub use state::{weighted_gradient_integral, Integrals, Quantities, SimulationState};

pub(crate) use initial::random_with_rng;

use std::path::Path;

use crate::error::Result;
use crate::operators::CbfParams;
use crate::scalar::Real;
use crate::spectral::snapshot::{self, SnapshotHeader};

/// Writes the state's field with a header recording time and parameters.
pub fn write_snapshot<T: Real>(state: &SimulationState<T>, params: &CbfParams<T>, path: &Path) -> Result<()> {
    let grid = state.u.grid();
    let header = SnapshotHeader {
        dim: grid.dim() as u64,
        n_points: grid.n_points() as u64,
        period: grid.period().to_f64_lossy(),
        time: state.t.to_f64_lossy(),
        r: params.r.to_f64_lossy(),
        mu: params.mu.to_f64_lossy(),
        alpha: params.alpha.to_f64_lossy(),
        beta: params.beta.to_f64_lossy(),
    };
    snapshot::write_snapshot(path, &header, &state.u)
}

/// Reads a snapshot back as `(time, field)` together with its header.
pub fn read_snapshot<T: Real>(path: &Path) -> Result<(SnapshotHeader, crate::spectral::SpectralField<T>)> {
    let (header, field) = snapshot::read_snapshot(path)?;
    Ok((header, field.certify_divergence_free()?))
}
