use crate::error::{CbfError, Result};
use crate::operators::{CbfParams, Regime};
use crate::scalar::Real;
use crate::solver::{apriori_bound, DiagnosticsSample, ForcingSpec, Solver, SolverConfig};
use crate::spectral::{leray_project, SpectralField};

use super::report::{CheckReport, Tally};

/// Relative slack for trajectory bounds.
pub const TRAJECTORY_TOL: f64 = 1e-6;

/// Runs the trajectories from `ic` and `ic + perturbation` in lockstep and
/// checks ‖u₁(t)−u₂(t)‖² ≤ ‖u₁(0)−u₂(0)‖²e^{2ρt} at every diagnostics
/// sample. At r = 3 with 2βμ ≥ 1 the envelope is constant and the distance
/// is also required to be non-increasing.
pub fn check_continuous_dependence<T: Real>(
    params: &CbfParams<T>,
    config: &SolverConfig<T>,
    ic: &SpectralField<T>,
    perturbation: &SpectralField<T>,
    forcing: &ForcingSpec<T>,
) -> Result<CheckReport> {
    let regime = params.regime();
    let (rate, exploratory) = match regime {
        Regime::Supercritical => (T::lit(2.0) * params.rho_constant().value, false),
        Regime::CriticalMonotone => (T::zero(), false),
        Regime::CriticalUncovered => (T::zero(), true),
        Regime::Subcritical => {
            return Err(CbfError::Regime(format!(
                "continuous dependence needs r ≥ 3, got r = {}",
                params.r
            )))
        }
    };
    let solver = Solver::new(ic.grid(), *params, config.clone(), forcing.clone())?;
    let mut s1 = solver.initial_state(ic)?;
    let mut s2 = solver.initial_state(&ic.add(perturbation)?)?;
    let distance = |a: &SpectralField<T>, b: &SpectralField<T>| -> Result<T> { Ok(a.sub(b)?.norm_h_sq()) };
    let d0 = distance(&s1.u, &s2.u)?;

    let mut envelope = Tally::new("exponential envelope", TRAJECTORY_TOL).exploratory(exploratory);
    let mut monotone = Tally::new("non-increasing distance", TRAJECTORY_TOL).exploratory(exploratory);
    envelope.note(format!("regime {regime}; growth rate 2ρ = {:.6e}", rate.to_f64_lossy()));
    if !rate.is_finite() {
        envelope.note("rho is infinite (beta = 0); envelope is vacuous");
    }
    envelope.record(0, 0.0, d0.to_f64_lossy());
    let mut prev = d0;
    let n_steps = config.n_steps();
    for m in 1..=n_steps {
        s1 = solver.step(&s1)?;
        s2 = solver.step(&s2)?;
        if m % config.diagnostics_every != 0 && m != n_steps {
            continue;
        }
        let d = distance(&s1.u, &s2.u)?;
        let elapsed = s1.t - s1.t_start;
        let bound = d0 * (rate * elapsed).exp();
        if rate.is_finite() {
            envelope.record(m as u64, (bound - d).to_f64_lossy(), bound.to_f64_lossy());
        } else {
            envelope.record(m as u64, 0.0, 1.0);
        }
        if rate == T::zero() {
            monotone.record(m as u64, (prev - d).to_f64_lossy(), prev.to_f64_lossy());
        }
        prev = d;
    }
    let mut parts = vec![envelope.finish()];
    if rate == T::zero() {
        parts.push(monotone.finish());
    }
    let mut report = CheckReport::combine("continuous_dependence", parts);
    report
        .notes
        .push(format!("initial squared distance {:.6e}", d0.to_f64_lossy()));
    Ok(report)
}

/// Checks E(t) + μ∫‖∇u‖² + 2β∫‖u‖_{r+1}^{r+1} ≤ ‖u₀‖² + (1/μ)∫‖f‖_{V′}² at
/// every sample of a trajectory.
pub fn check_apriori_bound<T: Real>(
    diagnostics: &[DiagnosticsSample<T>],
    params: &CbfParams<T>,
    ic: &SpectralField<T>,
    forcing: &ForcingSpec<T>,
) -> Result<CheckReport> {
    let ic = leray_project(ic)?;
    let t0 = diagnostics.first().map(|s| s.t).unwrap_or(T::zero());
    let mut t = Tally::new("apriori_bound", TRAJECTORY_TOL);
    for (i, s) in diagnostics.iter().enumerate() {
        let bound = apriori_bound(&ic, params, forcing, s.t - t0)?;
        let lhs = s.energy + params.mu * s.int_dissipation + T::lit(2.0) * params.beta * s.int_damping;
        t.record(i as u64, (bound - lhs).to_f64_lossy(), bound.to_f64_lossy());
    }
    Ok(t.finish())
}

/// Default θ for the r = 3 regularity estimate: 1/(2μ) + 10⁻⁶, capped at β.
pub fn default_theta<T: Real>(params: &CbfParams<T>) -> T {
    let theta = T::one() / (T::lit(2.0) * params.mu) + T::lit(1e-6);
    theta.min(params.beta)
}

/// Gradient-level regularity bound along a trajectory with extended
/// diagnostics.
///
/// r > 3: ‖∇u(t)‖² + μ∫‖Au‖² + β∫‖|u|^{(r−1)/2}|∇u|‖² ≤ K(t)e^{ρ*t},
/// K(t) = ‖∇u₀‖² + (2/μ)∫‖f‖_H².
/// r = 3, 2βμ ≥ 1: ‖∇u(t)‖² + (μ−1/(2θ))∫‖Au‖² + (β−θ)∫‖|u||∇u|‖² ≤ K(t).
///
/// The bound is asserted at every sample. The form with the supremum over
/// the whole interval is reported as an exploratory sub-check.
pub fn check_regularity_bound<T: Real>(
    diagnostics: &[DiagnosticsSample<T>],
    params: &CbfParams<T>,
    ic: &SpectralField<T>,
    forcing: &ForcingSpec<T>,
) -> Result<CheckReport> {
    check_regularity_bound_with_theta(diagnostics, params, ic, forcing, default_theta(params))
}

pub fn check_regularity_bound_with_theta<T: Real>(
    diagnostics: &[DiagnosticsSample<T>],
    params: &CbfParams<T>,
    ic: &SpectralField<T>,
    forcing: &ForcingSpec<T>,
    theta: T,
) -> Result<CheckReport> {
    let ext: Vec<_> = diagnostics
        .iter()
        .map(|s| {
            s.extended.ok_or_else(|| {
                CbfError::Configuration(
                    "regularity check needs extended diagnostics (‖Au‖² and the weighted gradient integral)".into(),
                )
            })
        })
        .collect::<Result<_>>()?;
    let (mu, beta) = (params.mu, params.beta);
    let (rate, a_coef, w_coef) = match params.regime() {
        Regime::Supercritical => (params.rho_star()?, mu, beta),
        Regime::CriticalMonotone => {
            let a = mu - T::one() / (T::lit(2.0) * theta);
            let w = beta - theta;
            if !(theta > T::zero() && a >= T::zero() && w >= T::zero()) {
                return Err(CbfError::InvalidParameter {
                    name: "theta",
                    reason: format!("need μ − 1/(2θ) ≥ 0 and β − θ ≥ 0, got θ = {theta}"),
                });
            }
            (T::zero(), a, w)
        }
        regime => {
            return Err(CbfError::Regime(format!(
                "no regularity estimate in the {regime} regime"
            )));
        }
    };
    let ic = leray_project(ic)?;
    let grad0 = ic.seminorm_grad().powi(2);
    let t0 = diagnostics.first().map(|s| s.t).unwrap_or(T::zero());
    let steady_f = if forcing.is_time_dependent() {
        None
    } else {
        Some(forcing.evaluate(ic.grid(), t0)?.norm_h_sq())
    };
    let two_over_mu = T::lit(2.0) / mu;

    let mut per_time = Tally::new("bound at every sample", TRAJECTORY_TOL);
    let mut literal = Tally::new("supremum form", TRAJECTORY_TOL).exploratory(true);
    if params.regime() == Regime::CriticalMonotone {
        per_time.note(format!("theta = {:.9}", theta.to_f64_lossy()));
    }
    if !rate.is_finite() {
        per_time.note("rho* is infinite (beta = 0); bound is vacuous");
    }
    let mut sup_grad = T::zero();
    let mut last_bound = T::zero();
    let mut last_integrals = T::zero();
    for (i, (s, e)) in diagnostics.iter().zip(&ext).enumerate() {
        let elapsed = s.t - t0;
        let f_int = steady_f.map(|f| f * elapsed).unwrap_or(e.int_forcing_h);
        let bound = (grad0 + two_over_mu * f_int) * (rate * elapsed).exp();
        let integrals = a_coef * e.int_a_norm + w_coef * e.int_weighted_grad;
        let q = s.v_seminorm_sq + integrals;
        if rate.is_finite() {
            per_time.record(i as u64, (bound - q).to_f64_lossy(), bound.to_f64_lossy());
        } else {
            per_time.record(i as u64, 0.0, 1.0);
        }
        sup_grad = sup_grad.max(s.v_seminorm_sq);
        last_bound = bound;
        last_integrals = integrals;
    }
    if !diagnostics.is_empty() && rate.is_finite() {
        let q = sup_grad + last_integrals;
        literal.record(
            diagnostics.len() as u64 - 1,
            (last_bound - q).to_f64_lossy(),
            last_bound.to_f64_lossy(),
        );
    }
    Ok(CheckReport::combine(
        "regularity_bound",
        vec![per_time.finish(), literal.finish()],
    ))
}
