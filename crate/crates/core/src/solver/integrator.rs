use num_complex::Complex;

use crate::error::{CbfError, Result};
use crate::operators::{CbfParams, Operators};
use crate::scalar::Real;
use crate::spectral::{leray_project, truncate_with, SpectralField, TorusGrid};

use super::config::{Scheme, SolverConfig};
use super::diagnostics::DiagnosticsSample;
use super::forcing::ForcingSpec;
use super::state::{Integrals, Quantities, SimulationState};

/// How a run ended.
#[derive(Clone, Debug, PartialEq)]
pub enum RunOutcome {
    Completed,
    BlowUp { last_valid_time: f64, reason: String },
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutput<T: Real> {
    /// Last valid state (the state before the failing step on blow-up).
    pub final_state: SimulationState<T>,
    pub diagnostics: Vec<DiagnosticsSample<T>>,
    /// `(t, u)` pairs at the snapshot cadence.
    pub snapshots: Vec<(T, SpectralField<T>)>,
    pub warnings: Vec<String>,
    pub outcome: RunOutcome,
}

impl<T: Real> RunOutput<T> {
    pub fn is_complete(&self) -> bool {
        self.outcome == RunOutcome::Completed
    }

    /// Converts a blow-up outcome into the corresponding error.
    pub fn into_result(self) -> Result<Self> {
        match &self.outcome {
            RunOutcome::Completed => Ok(self),
            RunOutcome::BlowUp {
                last_valid_time,
                reason,
            } => Err(CbfError::BlowUp {
                last_valid_time: *last_valid_time,
                reason: reason.clone(),
            }),
        }
    }
}

/// A configured integrator for one grid, parameter set and forcing.
#[derive(Clone, Debug)]
pub struct Solver<T: Real> {
    grid: TorusGrid<T>,
    ops: Operators<T>,
    config: SolverConfig<T>,
    forcing: ForcingSpec<T>,
}

impl<T: Real> Solver<T> {
    pub fn new(
        grid: &TorusGrid<T>,
        params: CbfParams<T>,
        config: SolverConfig<T>,
        forcing: ForcingSpec<T>,
    ) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        Ok(Self {
            grid: grid.clone(),
            ops: Operators::new(params).with_dealias(config.dealias),
            config,
            forcing,
        })
    }

    pub fn params(&self) -> &CbfParams<T> {
        self.ops.params()
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.config
    }

    pub fn forcing(&self) -> &ForcingSpec<T> {
        &self.forcing
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    fn truncate(&self, u: &SpectralField<T>) -> SpectralField<T> {
        if self.config.truncation.is_active() {
            truncate_with(u, self.config.truncation.n, self.config.truncation.shape)
        } else {
            u.clone()
        }
    }

    /// State at `t_start` for the initial field. Non-solenoidal input is
    /// projected; the returned flag reports whether that happened.
    pub fn initial_state_at(&self, u0: &SpectralField<T>, t_start: T) -> Result<(SimulationState<T>, bool)> {
        if u0.grid() != &self.grid {
            return Err(CbfError::IncompatibleGrids);
        }
        let projected = !u0.is_divergence_free();
        let u = self.truncate(&leray_project(u0)?);
        let f = self.forcing.evaluate(&self.grid, t_start)?;
        let current = Quantities::evaluate(&u, &f, self.params(), self.config.extended_diagnostics)?;
        Ok((
            SimulationState {
                t: t_start,
                t_start,
                substeps_taken: 0,
                u,
                prev_nonlinear: None,
                integrals: Integrals::default(),
                current,
                initial_energy: current.energy,
            },
            projected,
        ))
    }

    pub fn initial_state(&self, u0: &SpectralField<T>) -> Result<SimulationState<T>> {
        Ok(self.initial_state_at(u0, T::zero())?.0)
    }

    /// Advances one step of size dt (made of `substeps` internal updates).
    pub fn step(&self, state: &SimulationState<T>) -> Result<SimulationState<T>> {
        let mut s = self.substep(state)?;
        for _ in 1..self.config.substeps {
            s = self.substep(&s)?;
        }
        Ok(s)
    }

    fn substep(&self, state: &SimulationState<T>) -> Result<SimulationState<T>> {
        let params = *self.params();
        let s = T::from_usize_lossy(self.config.substeps);
        let h = self.config.dt / s;
        let n_next = state.substeps_taken + 1;
        let t_next = state.t_start + h * T::lit(n_next as f64);
        let blow = |reason: String| CbfError::BlowUp {
            last_valid_time: state.t.to_f64_lossy(),
            reason,
        };

        let nl = self.ops.nonlinear(&state.u)?;
        let f_now = self.forcing.evaluate(&self.grid, state.t)?;
        let grid = &self.grid;
        let half = T::lit(0.5);
        let (mu, alpha) = (params.mu, params.alpha);

        let use_cnab2 = self.config.scheme == Scheme::ImexCnab2 && state.prev_nonlinear.is_some();
        let f_next = self.forcing.evaluate(grid, t_next)?;
        let mut coefficients = Vec::with_capacity(grid.dim());
        for c in 0..grid.dim() {
            let u = state.u.component(c);
            let n = nl.component(c);
            let fm = f_now.component(c);
            let comp: Vec<Complex<T>> = if use_cnab2 {
                let prev = state.prev_nonlinear.as_ref().expect("checked above").component(c);
                let fp = f_next.component(c);
                (0..grid.len())
                    .map(|flat| {
                        let l = mu * grid.k_sq(flat) + alpha;
                        let explicit = n[flat] * T::lit(-1.5) + prev[flat] * half;
                        let rhs =
                            u[flat] * (T::one() - h * half * l) + explicit * h + (fp[flat] + fm[flat]) * (h * half);
                        rhs / (T::one() + h * half * l)
                    })
                    .collect()
            } else {
                (0..grid.len())
                    .map(|flat| {
                        let l = mu * grid.k_sq(flat) + alpha;
                        (u[flat] + (fm[flat] - n[flat]) * h) / (T::one() + h * l)
                    })
                    .collect()
            };
            coefficients.push(comp);
        }
        if coefficients
            .iter()
            .flatten()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(blow(format!("non-finite coefficient at t = {}", t_next)));
        }
        let mut u_next = SpectralField::new(grid.clone(), coefficients)?;
        u_next.set_divergence_free(state.u.is_divergence_free() && nl.is_divergence_free());
        let u_next = self.truncate(&u_next);

        let next = Quantities::evaluate(&u_next, &f_next, &params, self.config.extended_diagnostics)?;
        if !next.energy.is_finite() || !next.lr1.is_finite() {
            return Err(blow(format!("non-finite norm at t = {}", t_next)));
        }
        if state.initial_energy > T::zero() {
            let limit = self.config.blowup_factor * self.config.blowup_factor * state.initial_energy;
            if next.energy > limit {
                return Err(blow(format!(
                    "‖u‖_H grew beyond {} times its initial value at t = {}",
                    self.config.blowup_factor, t_next
                )));
            }
        }
        let mut integrals = state.integrals;
        integrals.accumulate(h, &state.current, &next, alpha);
        Ok(SimulationState {
            t: t_next,
            t_start: state.t_start,
            substeps_taken: n_next,
            u: u_next,
            prev_nonlinear: Some(nl),
            integrals,
            current: next,
            initial_energy: state.initial_energy,
        })
    }

    fn cfl_warning(&self, state: &SimulationState<T>) -> Option<String> {
        let k_max = self.grid.k0() * T::from_usize_lossy(self.grid.n_points() / 2);
        let cfl = self.config.dt * state.current.max_speed * k_max;
        (cfl >= T::one()).then(|| format!("CFL number dt·max|u|·k_max = {cfl:.3} ≥ 1 at t = {}", state.t))
    }

    /// Runs from `u0` at time zero.
    pub fn run(&self, u0: &SpectralField<T>) -> Result<RunOutput<T>> {
        self.run_from(u0, T::zero())
    }

    /// Runs from `u0` at `t_start` for `t_end` time units (the configured
    /// duration is measured from `t_start`).
    pub fn run_from(&self, u0: &SpectralField<T>, t_start: T) -> Result<RunOutput<T>> {
        let (mut state, projected) = self.initial_state_at(u0, t_start)?;
        let mut warnings = Vec::new();
        if projected {
            warnings.push("initial condition was not divergence-free; projected".to_string());
        }
        let params = *self.params();
        let mut diagnostics = vec![DiagnosticsSample::from_state(
            &state,
            &params,
            self.config.extended_diagnostics,
        )];
        let mut snapshots = Vec::new();
        let mut warned_cfl = false;
        let n_steps = self.config.n_steps();
        let mut outcome = RunOutcome::Completed;
        for m in 1..=n_steps {
            if !warned_cfl {
                if let Some(w) = self.cfl_warning(&state) {
                    warnings.push(w);
                    warned_cfl = true;
                }
            }
            match self.step(&state) {
                Ok(next) => state = next,
                Err(CbfError::BlowUp {
                    last_valid_time,
                    reason,
                }) => {
                    outcome = RunOutcome::BlowUp {
                        last_valid_time,
                        reason,
                    };
                    break;
                }
                Err(e) => return Err(e),
            }
            if m % self.config.diagnostics_every == 0 || m == n_steps {
                diagnostics.push(DiagnosticsSample::from_state(
                    &state,
                    &params,
                    self.config.extended_diagnostics,
                ));
            }
            if self.config.snapshot_every > 0 && m % self.config.snapshot_every == 0 {
                snapshots.push((state.t, state.u.clone()));
            }
        }
        Ok(RunOutput {
            final_state: state,
            diagnostics,
            snapshots,
            warnings,
            outcome,
        })
    }
}

/// One step of the configured scheme.
pub fn step<T: Real>(
    state: &SimulationState<T>,
    params: &CbfParams<T>,
    config: &SolverConfig<T>,
    forcing: &ForcingSpec<T>,
) -> Result<SimulationState<T>> {
    Solver::new(state.u.grid(), *params, config.clone(), forcing.clone())?.step(state)
}

/// Runs from `ic` to `config.t_end`.
pub fn run<T: Real>(
    ic: &SpectralField<T>,
    params: &CbfParams<T>,
    config: &SolverConfig<T>,
    forcing: &ForcingSpec<T>,
) -> Result<RunOutput<T>> {
    Solver::new(ic.grid(), *params, config.clone(), forcing.clone())?.run(ic)
}
