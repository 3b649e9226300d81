use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{CbfError, Result};
use crate::operators::{op_a, op_c, trilinear_b, CbfParams, Operators};
use crate::scalar::Real;
use crate::spectral::{
    lp_integral_physical, norm_lp_physical, norm_v_dual, scalar_gradient, to_physical, to_spectral, PhysicalField,
    SpectralField,
};

use super::report::{CheckReport, Tally};
use super::sampler::FieldSampler;
use super::{weighted_sq, INEQUALITY_TOL};

fn check_r<T: Real>(r: T) -> Result<()> {
    if !(r >= T::one() && r.is_finite()) {
        return Err(CbfError::InvalidExponent(r.to_f64_lossy()));
    }
    Ok(())
}

/// Lower and upper bounds for ⟨C(u)−C(v), u−v⟩:
/// ½‖|u|^{(r−1)/2}w‖² + ½‖|v|^{(r−1)/2}w‖² ≤ ⟨C(u)−C(v),w⟩
/// ≤ r(‖u‖_{r+1} + ‖v‖_{r+1})^{r−1}‖w‖_{r+1}², together with plain
/// non-negativity.
pub fn check_c_monotone<T: Real>(sampler: &FieldSampler<T>, r: T, n_samples: usize) -> Result<CheckReport> {
    check_r(r)?;
    let half = T::lit(0.5);
    let rp1 = r + T::one();
    let mut lower = Tally::new("lower bound", INEQUALITY_TOL).keep_details(sampler.record_details);
    let mut positive = Tally::new("non-negativity", INEQUALITY_TOL).keep_details(sampler.record_details);
    let mut upper = Tally::new("lipschitz upper bound", INEQUALITY_TOL).keep_details(sampler.record_details);
    for i in 0..n_samples {
        let seed = sampler.sample_seed(i);
        let (u, v) = sampler.pair(seed)?;
        let w = u.sub(&v)?;
        let pairing = op_c(&u, r)?.sub(&op_c(&v, r)?)?.pairing(&w)?;
        let (up, vp, wp) = (to_physical(&u)?, to_physical(&v)?, to_physical(&w)?);
        let e = r - T::one();
        let rhs = half * weighted_sq(&up, &wp, e) + half * weighted_sq(&vp, &wp, e);
        let scale = (pairing.abs() + rhs).to_f64_lossy();
        lower.record(seed, (pairing - rhs).to_f64_lossy(), scale);
        positive.record(seed, pairing.to_f64_lossy(), scale);
        let bound = r
            * (norm_lp_physical(&up, rp1)? + norm_lp_physical(&vp, rp1)?).powf(e)
            * norm_lp_physical(&wp, rp1)?.powi(2);
        upper.record(
            seed,
            (bound - pairing).to_f64_lossy(),
            (bound + pairing.abs()).to_f64_lossy(),
        );
    }
    Ok(CheckReport::combine(
        "c_monotone",
        vec![lower.finish(), positive.finish(), upper.finish()],
    ))
}

/// Pointwise bounds on random vector pairs in ℝ^dim:
/// (|y|^{r−1}y − |z|^{r−1}z)·(y−z) ≥ ½(|y|^{r−1}+|z|^{r−1})|y−z|² and the
/// mean value bound ||y|^{r−1}y − |z|^{r−1}z| ≤ r(|y|+|z|)^{r−1}|y−z|.
pub fn check_pointwise_monotone(seed: u64, r: f64, dim: usize, n_samples: usize) -> Result<CheckReport> {
    check_r(r)?;
    if dim == 0 {
        return Err(CbfError::InvalidArguments("dimension must be positive".into()));
    }
    let mut lower = Tally::new("lower bound", INEQUALITY_TOL);
    let mut mvt = Tally::new("mean value bound", INEQUALITY_TOL);
    let norm = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
    for i in 0..n_samples {
        let s = seed.wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let scale_y = rng.random_range(-3.0f64..3.0).exp();
        let scale_z = rng.random_range(-3.0f64..3.0).exp();
        let y: Vec<f64> = (0..dim)
            .map(|_| scale_y * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let z: Vec<f64> = (0..dim)
            .map(|_| scale_z * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let (ny, nz) = (norm(&y), norm(&z));
        let (py, pz) = (ny.powf(r - 1.0), nz.powf(r - 1.0));
        let d: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a - b).collect();
        let diff: Vec<f64> = (0..dim).map(|j| py * y[j] - pz * z[j]).collect();
        let lhs: f64 = diff.iter().zip(&d).map(|(a, b)| a * b).sum();
        let nd = norm(&d);
        let rhs = 0.5 * (py + pz) * nd * nd;
        lower.record(s, lhs - rhs, lhs.abs() + rhs);
        let gap = norm(&diff);
        let bound = r * (ny + nz).powf(r - 1.0) * nd;
        mvt.record(s, bound - gap, bound + gap);
    }
    Ok(CheckReport::combine(
        "pointwise_monotone",
        vec![lower.finish(), mvt.finish()],
    ))
}

/// b(u,v,v) = 0 and b(u,v,w) = −b(u,w,v) on sampled triples, each defect
/// normalized by ‖u‖_∞·‖∇v‖·‖w‖ (resp. the symmetric counterpart).
pub fn check_trilinear<T: Real>(sampler: &FieldSampler<T>, n_samples: usize) -> Result<CheckReport> {
    let mut vanishing = Tally::new("b(u,v,v) = 0", INEQUALITY_TOL).keep_details(sampler.record_details);
    let mut antisym = Tally::new("antisymmetry", INEQUALITY_TOL).keep_details(sampler.record_details);
    for i in 0..n_samples {
        let seed = sampler.sample_seed(i);
        let f = sampler.fields(seed, 3)?;
        let (u, v, w) = (&f[0], &f[1], &f[2]);
        let sup = to_physical(u)?.max_abs();
        let scale_vv = sup * v.seminorm_grad() * v.norm_h();
        vanishing.record(
            seed,
            -trilinear_b(u, v, v)?.abs().to_f64_lossy(),
            scale_vv.to_f64_lossy(),
        );
        let scale_vw = sup * (v.seminorm_grad() * w.norm_h() + w.seminorm_grad() * v.norm_h());
        let sum = trilinear_b(u, v, w)? + trilinear_b(u, w, v)?;
        antisym.record(seed, -sum.abs().to_f64_lossy(), scale_vw.to_f64_lossy());
    }
    Ok(CheckReport::combine(
        "trilinear",
        vec![vanishing.finish(), antisym.finish()],
    ))
}

/// The three forms of ∫(−Δu)·|u|^{r−1}u, their values in order.
pub fn identity_3_forms<T: Real>(u: &SpectralField<T>, r: T) -> Result<[T; 3]> {
    check_r(r)?;
    let grid = u.grid();
    let up = to_physical(u)?;
    let lap = to_physical(&u.laplacian())?;
    let grads: Vec<PhysicalField<T>> = u.gradient().iter().map(to_physical).collect::<Result<_>>()?;
    let mag = up.magnitude();
    let sq = PhysicalField::new(grid.clone(), vec![mag.iter().map(|m| *m * *m).collect()])?;
    let grad_sq = to_physical(&scalar_gradient(&to_spectral(&sq)?)?)?;

    let one = T::one();
    let e = r - one;
    let p = (r + one) / T::lit(2.0);
    let pw = |m: T, x: T| {
        if x == T::zero() {
            one
        } else if m == T::zero() {
            T::zero()
        } else {
            m.powf(x)
        }
    };
    let dim = grid.dim();
    let (mut f1, mut base, mut chain, mut spectral) = (T::zero(), T::zero(), T::zero(), T::zero());
    for flat in 0..grid.len() {
        let uvec = up.at(flat);
        let lvec = lap.at(flat);
        let mut u_lap = T::zero();
        for c in 0..dim {
            u_lap = u_lap + uvec[c] * lvec[c];
        }
        f1 = f1 - pw(mag[flat], e) * u_lap;
        let mut g2 = T::zero();
        let mut proj = T::zero();
        for dj in &grads {
            let d = dj.at(flat);
            let mut dot = T::zero();
            for c in 0..dim {
                g2 = g2 + d[c] * d[c];
                dot = dot + uvec[c] * d[c];
            }
            proj = proj + dot * dot;
        }
        base = base + pw(mag[flat], e) * g2;
        if e > T::zero() && mag[flat] > T::zero() {
            chain = chain + p * p * pw(mag[flat], r - T::lit(3.0)) * proj;
            let s = grad_sq.at(flat);
            let s2: T = (0..dim).map(|j| s[j] * s[j]).sum();
            spectral = spectral + pw(mag[flat], r - T::lit(3.0)) * s2;
        }
    }
    let cell = grid.cell_volume();
    let (f1, base, chain, spectral) = (f1 * cell, base * cell, chain * cell, spectral * cell);
    let rp1 = r + one;
    let form2 = base + T::lit(4.0) * e / (rp1 * rp1) * chain;
    let form3 = base + e / T::lit(4.0) * spectral;
    Ok([f1, form2, form3])
}

/// ∫(−Δu)·|u|^{r−1}u = ∫|∇u|²|u|^{r−1} + 4(r−1)/(r+1)²∫|∇|u|^{(r+1)/2}|²
/// = ∫|∇u|²|u|^{r−1} + (r−1)/4∫|u|^{r−3}|∇|u|²|², plus the chain
/// 0 ≤ ∫|∇u|²|u|^{r−1} ≤ ⟨C(u),Au⟩ ≤ r∫|∇u|²|u|^{r−1}.
///
/// The second form differentiates |u|^{(r+1)/2} by the chain rule; the third
/// differentiates |u|² spectrally.
pub fn check_identity_3<T: Real>(sampler: &FieldSampler<T>, r: T, n_samples: usize) -> Result<CheckReport> {
    check_r(r)?;
    let mut agree = Tally::new("three forms agree", 1e-6).keep_details(sampler.record_details);
    let mut chain = Tally::new("inequality chain", INEQUALITY_TOL).keep_details(sampler.record_details);
    let one = T::one();
    let e = r - one;
    for i in 0..n_samples {
        let seed = sampler.sample_seed(i);
        let u = sampler.field(seed)?;
        let forms = identity_3_forms(&u, r)?;
        let biggest = forms.iter().fold(T::zero(), |a, b| a.max(b.abs()));
        let mut worst = T::zero();
        for a in 0..3 {
            for b in a + 1..3 {
                worst = worst.max((forms[a] - forms[b]).abs());
            }
        }
        agree.record(seed, -worst.to_f64_lossy(), biggest.to_f64_lossy());

        let up = to_physical(&u)?;
        let base = crate::solver::weighted_gradient_integral(&u, &up, r)?;
        let c_a = op_c(&u, r)?.pairing(&op_a(&u)?)?;
        let scale = (c_a.abs() + r * base).to_f64_lossy();
        chain.record(seed, base.to_f64_lossy(), scale);
        chain.record(seed, (c_a - base).to_f64_lossy(), scale);
        chain.record(seed, (r * base - c_a).to_f64_lossy(), scale);
    }
    if e == T::zero() {
        agree.note("r = 1: every form reduces to ∫|∇u|²");
    }
    Ok(CheckReport::combine("identity_3", vec![agree.finish(), chain.finish()]))
}

/// ‖u‖_{L^ρ} ≤ ‖u‖_{L^s}^θ‖u‖_{L^t}^{1−θ} with 1/ρ = θ/s + (1−θ)/t.
pub fn check_interpolation<T: Real>(
    sampler: &FieldSampler<T>,
    s: T,
    rho: T,
    t: T,
    n_samples: usize,
) -> Result<CheckReport> {
    if !(T::one() <= s && s <= rho && rho <= t && t.is_finite()) {
        return Err(CbfError::InvalidArguments(format!(
            "interpolation needs 1 ≤ s ≤ ρ ≤ t < ∞, got s = {s}, ρ = {rho}, t = {t}"
        )));
    }
    let one = T::one();
    let theta = if s == t {
        one
    } else {
        (one / rho - one / t) / (one / s - one / t)
    };
    let mut tally = Tally::new("interpolation", INEQUALITY_TOL).keep_details(sampler.record_details);
    tally.note(format!("theta = {:.6}", theta.to_f64_lossy()));
    for i in 0..n_samples {
        let seed = sampler.sample_seed(i);
        let up = to_physical(&sampler.field(seed)?)?;
        let lhs = norm_lp_physical(&up, rho)?;
        let rhs = norm_lp_physical(&up, s)?.powf(theta) * norm_lp_physical(&up, t)?.powf(one - theta);
        tally.record(seed, (rhs - lhs).to_f64_lossy(), rhs.to_f64_lossy());
    }
    Ok(tally.finish())
}

/// ‖B(u,v)‖_{V′} ≤ ‖u‖_{L^{r+1}}‖v‖_{L^{2(r+1)/(r−1)}} for r ≥ 3 and, for
/// r > 3, |⟨B(u,u),v⟩| ≤ ‖u‖_{r+1}^{(r+1)/(r−1)}‖u‖_H^{(r−3)/(r−1)}‖∇v‖.
pub fn check_b_bounds<T: Real>(sampler: &FieldSampler<T>, r: T, n_samples: usize) -> Result<CheckReport> {
    check_r(r)?;
    let three = T::lit(3.0);
    if r < three {
        return Err(CbfError::Regime(format!("convective bounds need r ≥ 3, got r = {r}")));
    }
    let ops = Operators::new(CbfParams::new(T::one(), T::zero(), T::zero(), r)?);
    let one = T::one();
    let rp1 = r + one;
    let q = T::lit(2.0) * rp1 / (r - one);
    let mut dual = Tally::new("dual norm bound", 1e-8).keep_details(sampler.record_details);
    let mut trilinear = Tally::new("trilinear bound", 1e-8).keep_details(sampler.record_details);
    if r == three {
        trilinear.note("skipped at r = 3");
    }
    for i in 0..n_samples {
        let seed = sampler.sample_seed(i);
        let fields = sampler.fields(seed, 3)?;
        let (u, v, w) = (&fields[0], &fields[1], &fields[2]);
        let up = to_physical(u)?;
        let u_r = norm_lp_physical(&up, rp1)?;
        let lhs = norm_v_dual(&ops.b(u, v)?);
        let rhs = u_r * norm_lp_physical(&to_physical(v)?, q)?;
        dual.record(seed, (rhs - lhs).to_f64_lossy(), rhs.to_f64_lossy());
        if r > three {
            let lhs = ops.b(u, u)?.pairing(w)?.abs();
            let rhs = u_r.powf(rp1 / (r - one)) * u.norm_h().powf((r - three) / (r - one)) * w.seminorm_grad();
            trilinear.record(seed, (rhs - lhs).to_f64_lossy(), rhs.to_f64_lossy());
        }
    }
    Ok(CheckReport::combine(
        "b_bounds",
        vec![dual.finish(), trilinear.finish()],
    ))
}

/// Ratio ‖u‖_{L^{p(r+1)}}^{r+1} / (∫|∇u|²|u|^{r−1} + ∫|u|^{r+1}) for the
/// Sobolev-type embeddings (p = 2 in two dimensions, 3 in three). The
/// embedding constant is unknown, so the ratios are reported only.
pub fn report_sobolev_ratios<T: Real>(sampler: &FieldSampler<T>, r: T, n_samples: usize) -> Result<CheckReport> {
    check_r(r)?;
    let p = if sampler.grid.dim() == 3 {
        T::lit(3.0)
    } else {
        T::lit(2.0)
    };
    let rp1 = r + T::one();
    let mut t = Tally::new("sobolev_ratios", INEQUALITY_TOL)
        .keep_details(sampler.record_details)
        .exploratory(true);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..n_samples {
        let seed = sampler.sample_seed(i);
        let u = sampler.field(seed)?;
        let up = to_physical(&u)?;
        let lhs = norm_lp_physical(&up, p * rp1)?.powf(rp1);
        let rhs = crate::solver::weighted_gradient_integral(&u, &up, r)? + lp_integral_physical(&up, rp1)?;
        let ratio = (lhs / rhs).to_f64_lossy();
        if ratio.is_finite() {
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            t.record(seed, 0.0, 1.0);
        } else {
            t.record(seed, f64::NEG_INFINITY, 1.0);
        }
    }
    t.note(format!("p = {}, ratio range [{lo:.6e}, {hi:.6e}]", p.to_f64_lossy()));
    Ok(t.finish())
}
