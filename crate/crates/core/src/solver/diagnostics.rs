use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{CbfError, Result};
use crate::operators::CbfParams;
use crate::scalar::Real;
use crate::spectral::{norm_v_dual_sq, SpectralField};

use super::forcing::ForcingSpec;
use super::state::SimulationState;

/// Column order of the diagnostics table.
pub const COLUMNS: [&str; 10] = [
    "t",
    "energy",
    "v_seminorm_sq",
    "v_norm_sq",
    "lr1_norm",
    "forcing_power",
    "energy_residual",
    "int_dissipation",
    "int_damping",
    "int_forcing",
];

/// Columns appended in extended mode.
pub const EXTENDED_COLUMNS: [&str; 7] = [
    "a_norm_sq",
    "weighted_grad",
    "forcing_h_sq",
    "int_darcy",
    "int_a_norm",
    "int_weighted_grad",
    "int_forcing_h",
];

/// Extra per-sample terms needed by the regularity checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtendedDiagnostics<T: Real> {
    /// ‖Au‖².
    pub a_norm_sq: T,
    /// ∫|u|^{r−1}|∇u|².
    pub weighted_grad: T,
    /// ‖f‖_H².
    pub forcing_h_sq: T,
    /// ∫α‖u‖².
    pub int_darcy: T,
    pub int_a_norm: T,
    pub int_weighted_grad: T,
    pub int_forcing_h: T,
}

/// One time slice of the energy budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsSample<T: Real> {
    pub t: T,
    /// ‖u‖_H².
    pub energy: T,
    /// ‖∇u‖_H².
    pub v_seminorm_sq: T,
    /// Full H¹ norm squared.
    pub v_norm_sq: T,
    /// ∫|u|^{r+1}.
    pub lr1_norm: T,
    /// ⟨f, u⟩.
    pub forcing_power: T,
    /// Cumulative defect of the energy equality since the start of the run.
    pub energy_residual: T,
    /// ∫‖∇u‖².
    pub int_dissipation: T,
    /// ∫∫|u|^{r+1}.
    pub int_damping: T,
    /// ∫⟨f, u⟩.
    pub int_forcing: T,
    /// ∫α‖u‖², kept for the residual of partial series.
    pub int_darcy: T,
    pub extended: Option<ExtendedDiagnostics<T>>,
}

impl<T: Real> DiagnosticsSample<T> {
    pub fn from_state(state: &SimulationState<T>, params: &CbfParams<T>, extended: bool) -> Self {
        let q = &state.current;
        let i = &state.integrals;
        Self {
            t: state.t,
            energy: q.energy,
            v_seminorm_sq: q.v_seminorm_sq,
            v_norm_sq: q.v_norm_sq,
            lr1_norm: q.lr1,
            forcing_power: q.forcing_power,
            energy_residual: state.cumulative_energy_residual(params),
            int_dissipation: i.dissipation,
            int_damping: i.damping,
            int_forcing: i.forcing,
            int_darcy: i.darcy,
            extended: extended.then_some(ExtendedDiagnostics {
                a_norm_sq: q.a_norm_sq,
                weighted_grad: q.weighted_grad,
                forcing_h_sq: q.forcing_h_sq,
                int_darcy: i.darcy,
                int_a_norm: i.a_norm,
                int_weighted_grad: i.weighted_grad,
                int_forcing_h: i.forcing_h,
            }),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }

    /// Values in table order (extended columns appended when present).
    pub fn values(&self) -> Vec<T> {
        let mut v = vec![
            self.t,
            self.energy,
            self.v_seminorm_sq,
            self.v_norm_sq,
            self.lr1_norm,
            self.forcing_power,
            self.energy_residual,
            self.int_dissipation,
            self.int_damping,
            self.int_forcing,
        ];
        if let Some(e) = &self.extended {
            v.extend([
                e.a_norm_sq,
                e.weighted_grad,
                e.forcing_h_sq,
                e.int_darcy,
                e.int_a_norm,
                e.int_weighted_grad,
                e.int_forcing_h,
            ]);
        }
        v
    }
}

/// Defect of the energy equality over one interval:
/// Δ‖u‖² + 2Δt·avg(μ‖∇u‖² + α‖u‖² + β‖u‖_{r+1}^{r+1} − ⟨f,u⟩), with the
/// trapezoidal average of the two endpoint integrands.
pub fn energy_residual<T: Real>(
    prev: &DiagnosticsSample<T>,
    next: &DiagnosticsSample<T>,
    dt: T,
    params: &CbfParams<T>,
) -> T {
    let integrand = |s: &DiagnosticsSample<T>| {
        params.mu * s.v_seminorm_sq + params.alpha * s.energy + params.beta * s.lr1_norm - s.forcing_power
    };
    next.energy - prev.energy + dt * (integrand(prev) + integrand(next))
}

/// Σ|per-interval energy defect| over consecutive samples.
pub fn total_abs_energy_residual<T: Real>(samples: &[DiagnosticsSample<T>], params: &CbfParams<T>) -> T {
    samples
        .windows(2)
        .map(|w| energy_residual(&w[0], &w[1], w[1].t - w[0].t, params).abs())
        .sum()
}

/// Number of trapezoid panels used for the forcing integral in
/// [`apriori_bound`].
const APRIORI_PANELS: usize = 256;

/// ‖u₀‖_H² + (1/μ)∫₀ᵗ‖f(s)‖_{V′}² ds.
pub fn apriori_bound<T: Real>(
    ic: &SpectralField<T>,
    params: &CbfParams<T>,
    forcing: &ForcingSpec<T>,
    t: T,
) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(CbfError::InvalidArguments(format!("t must be non-negative, got {t}")));
    }
    let base = ic.norm_h_sq();
    if forcing.is_zero() || t == T::zero() {
        return Ok(base);
    }
    let grid = ic.grid();
    let integral = if forcing.is_time_dependent() {
        let h = t / T::from_usize_lossy(APRIORI_PANELS);
        let mut acc = T::zero();
        let mut prev = norm_v_dual_sq(&forcing.evaluate(grid, T::zero())?);
        for j in 1..=APRIORI_PANELS {
            let cur = norm_v_dual_sq(&forcing.evaluate(grid, h * T::from_usize_lossy(j))?);
            acc = acc + h * T::lit(0.5) * (prev + cur);
            prev = cur;
        }
        acc
    } else {
        t * norm_v_dual_sq(&forcing.evaluate(grid, T::zero())?)
    };
    Ok(base + integral / params.mu)
}

/// Tab-delimited table with a header line.
pub fn write_diagnostics_to<T: Real>(mut w: impl Write, samples: &[DiagnosticsSample<T>]) -> std::io::Result<()> {
    let extended = samples.first().is_some_and(|s| s.extended.is_some());
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if extended {
        header.extend(EXTENDED_COLUMNS);
    }
    writeln!(w, "{}", header.join("\t"))?;
    for s in samples {
        let row: Vec<String> = s
            .values()
            .iter()
            .map(|v| format!("{:.17e}", v.to_f64_lossy()))
            .collect();
        writeln!(w, "{}", row.join("\t"))?;
    }
    w.flush()
}

pub fn write_diagnostics<T: Real>(samples: &[DiagnosticsSample<T>], path: &Path) -> Result<()> {
    let io = |source| CbfError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    write_diagnostics_to(BufWriter::new(file), samples).map_err(io)
}
