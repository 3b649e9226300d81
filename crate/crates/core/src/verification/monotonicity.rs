use crate::error::{CbfError, Result};
use crate::operators::{CbfParams, Operators, Regime};
use crate::scalar::Real;
use crate::spectral::{lp_integral_physical, to_physical, SpectralField};

use super::report::{CheckReport, Tally};
use super::sampler::FieldSampler;
use super::{weighted_sq, INEQUALITY_TOL};

/// Per-pair quantities shared by the monotonicity checks.
struct PairTerms<T: Real> {
    /// ⟨G(u)−G(v), w⟩ with w = u − v.
    g_pairing: T,
    /// |⟨B(u)−B(v), w⟩|.
    b_abs: T,
    /// |⟨C(u)−C(v), w⟩|.
    c_abs: T,
    seminorm_sq: T,
    h_sq: T,
    /// ⟨B(w,w), v⟩.
    b_wwv: T,
    w: SpectralField<T>,
    v: SpectralField<T>,
}

fn pair_terms<T: Real>(ops: &Operators<T>, u: &SpectralField<T>, v: &SpectralField<T>) -> Result<PairTerms<T>> {
    let w = u.sub(v)?;
    let g_pairing = ops.g(u)?.sub(&ops.g(v)?)?.pairing(&w)?;
    let b_abs = ops.b(u, u)?.sub(&ops.b(v, v)?)?.pairing(&w)?.abs();
    let c_abs = ops.c(u)?.sub(&ops.c(v)?)?.pairing(&w)?.abs();
    let b_wwv = ops.b(&w, &w)?.pairing(v)?;
    Ok(PairTerms {
        g_pairing,
        b_abs,
        c_abs,
        seminorm_sq: w.seminorm_grad().powi(2),
        h_sq: w.norm_h_sq(),
        b_wwv,
        w,
        v: v.clone(),
    })
}

/// ⟨G(u)−G(v),u−v⟩ + ρ‖u−v‖² ≥ (μ/2)‖∇(u−v)‖² for r > 3, with the
/// intermediate convective bound
/// |⟨B(w,w),v⟩| ≤ (μ/2)‖∇w‖² + (β/2)‖|v|^{(r−1)/2}w‖² + ρ‖w‖² as a sub-check.
pub fn check_monotonicity_r_gt_3<T: Real>(
    sampler: &FieldSampler<T>,
    params: &CbfParams<T>,
    n_samples: usize,
) -> Result<CheckReport> {
    check_monotonicity_r_gt_3_with(sampler, params, n_samples, params.rho_constant().value)
}

/// As [`check_monotonicity_r_gt_3`] with an explicit shift ρ.
pub fn check_monotonicity_r_gt_3_with<T: Real>(
    sampler: &FieldSampler<T>,
    params: &CbfParams<T>,
    n_samples: usize,
    rho: T,
) -> Result<CheckReport> {
    params.validate()?;
    if params.regime() != Regime::Supercritical {
        return Err(CbfError::Regime(format!(
            "monotonicity with shift needs r > 3, got r = {}",
            params.r
        )));
    }
    let ops = Operators::new(*params);
    let (mu, alpha, beta, r) = (params.mu, params.alpha, params.beta, params.r);
    let half = T::lit(0.5);
    let mut main = Tally::new("shifted monotonicity", INEQUALITY_TOL).keep_details(sampler.record_details);
    let mut split = Tally::new("convective bound", INEQUALITY_TOL).keep_details(sampler.record_details);
    if !rho.is_finite() {
        main.note("rho is infinite (beta = 0); inequality is vacuous");
    }
    main.note(format!("rho = {:.6e}", rho.to_f64_lossy()));
    for i in 0..n_samples {
        let seed = sampler.sample_seed(i);
        let (u, v) = sampler.pair(seed)?;
        let p = pair_terms(&ops, &u, &v)?;
        let shift = if rho.is_finite() { rho * p.h_sq } else { T::zero() };
        let margin = p.g_pairing + shift - half * mu * p.seminorm_sq;
        let scale = mu * p.seminorm_sq + alpha * p.h_sq + p.b_abs + beta * p.c_abs + shift + half * mu * p.seminorm_sq;
        if rho.is_finite() {
            main.record(seed, margin.to_f64_lossy(), scale.to_f64_lossy());
        } else {
            main.record(seed, 0.0, 1.0);
        }

        let weighted = weighted_sq(&to_physical(&p.v)?, &to_physical(&p.w)?, r - T::one());
        let rhs = half * mu * p.seminorm_sq + half * beta * weighted + shift;
        let lhs = p.b_wwv.abs();
        if rho.is_finite() {
            split.record(seed, (rhs - lhs).to_f64_lossy(), (rhs + lhs).to_f64_lossy());
        } else {
            split.record(seed, 0.0, 1.0);
        }
    }
    Ok(CheckReport::combine(
        "monotonicity_r_gt_3",
        vec![main.finish(), split.finish()],
    ))
}

/// ⟨G(u)−G(v),u−v⟩ ≥ ½(β − 1/(2μ))‖|v|(u−v)‖² at r = 3. Runs in
/// exploratory mode when 2βμ < 1.
pub fn check_monotonicity_r3<T: Real>(
    sampler: &FieldSampler<T>,
    params: &CbfParams<T>,
    n_samples: usize,
) -> Result<CheckReport> {
    params.validate()?;
    if params.r != T::lit(3.0) {
        return Err(CbfError::Regime(format!(
            "global monotonicity check needs r = 3, got r = {}",
            params.r
        )));
    }
    let exploratory = params.regime() == Regime::CriticalUncovered;
    let ops = Operators::new(*params);
    let (mu, alpha, beta) = (params.mu, params.alpha, params.beta);
    let half = T::lit(0.5);
    let coefficient = half * (beta - T::one() / (T::lit(2.0) * mu));
    let mut t = Tally::new("monotonicity_r3", INEQUALITY_TOL)
        .keep_details(sampler.record_details)
        .exploratory(exploratory);
    if exploratory {
        t.note("2βμ < 1: no global monotonicity statement; margins reported only");
    }
    for i in 0..n_samples {
        let seed = sampler.sample_seed(i);
        let (u, v) = sampler.pair(seed)?;
        let p = pair_terms(&ops, &u, &v)?;
        let weighted = weighted_sq(&to_physical(&p.v)?, &to_physical(&p.w)?, T::lit(2.0));
        let lower = coefficient * weighted;
        let margin = p.g_pairing - lower;
        let scale = mu * p.seminorm_sq + alpha * p.h_sq + p.b_abs + beta * p.c_abs + lower.abs();
        t.record(seed, margin.to_f64_lossy(), scale.to_f64_lossy());
    }
    Ok(t.finish())
}

/// The two-dimensional r = 3 local bound
/// |⟨B(w,w),v⟩| ≤ (μ/2)‖∇w‖² + 27/(16μ³)‖v‖_{L⁴}⁴‖w‖².
pub fn check_local_bound_2d<T: Real>(sampler: &FieldSampler<T>, mu: T, n_samples: usize) -> Result<CheckReport> {
    if sampler.grid.dim() != 2 {
        return Err(CbfError::NotApplicable(format!(
            "the local L⁴ bound is two-dimensional, grid has dimension {}",
            sampler.grid.dim()
        )));
    }
    if !(mu > T::zero()) {
        return Err(CbfError::InvalidParameter {
            name: "mu",
            reason: format!("must be positive, got {mu}"),
        });
    }
    let ops = Operators::new(CbfParams::new(mu, T::zero(), T::zero(), T::lit(3.0))?);
    let constant = T::lit(27.0) / (T::lit(16.0) * mu.powi(3));
    let mut t = Tally::new("local_bound_2d", INEQUALITY_TOL).keep_details(sampler.record_details);
    for i in 0..n_samples {
        let seed = sampler.sample_seed(i);
        let (u, v) = sampler.pair(seed)?;
        let w = u.sub(&v)?;
        let lhs = ops.b(&w, &w)?.pairing(&v)?.abs();
        let l4 = lp_integral_physical(&to_physical(&v)?, T::lit(4.0))?;
        let rhs = T::lit(0.5) * mu * w.seminorm_grad().powi(2) + constant * l4 * w.norm_h_sq();
        t.record(seed, (rhs - lhs).to_f64_lossy(), (rhs + lhs).to_f64_lossy());
    }
    Ok(t.finish())
}
