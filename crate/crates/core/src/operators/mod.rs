//! The CBF operator algebra on the torus: Stokes operator A, convection B,
//! damping C, the combined operator G and pressure recovery.
//!
//! Nonlinear terms are evaluated pseudo-spectrally: pointwise products in
//! physical space, forward transform, 2/3-rule dealiasing (when enabled),
//! then Leray projection.

mod params;

use num_complex::Complex;

pub use params::{rho_constant, rho_star_constant, CbfParams, Regime, RhoConstant, RhoVariant};

use crate::error::{CbfError, Result};
use crate::scalar::Real;
use crate::spectral::{
    czero, dealias, duality_pairing, leray_project, physical_pairing, to_physical, to_spectral, PhysicalField,
    SpectralField,
};

/// Operator bundle for a fixed parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct Operators<T: Real> {
    params: CbfParams<T>,
    dealias: bool,
}

fn require_divergence_free<T: Real>(u: &SpectralField<T>, what: &str) -> Result<()> {
    u.require_vector()?;
    if !u.is_divergence_free() {
        return Err(CbfError::ContractViolation(format!(
            "{what} requires a divergence-free (Leray-projected) argument"
        )));
    }
    Ok(())
}

fn check_r<T: Real>(r: T) -> Result<()> {
    if !(r.is_finite() && r >= T::one()) {
        return Err(CbfError::InvalidExponent(r.to_f64_lossy()));
    }
    Ok(())
}

/// (u·∇)v evaluated pointwise on the grid.
pub fn convective_physical<T: Real>(u: &SpectralField<T>, v: &SpectralField<T>) -> Result<PhysicalField<T>> {
    u.require_vector()?;
    v.require_vector()?;
    u.check_compatible(v)?;
    let up = to_physical(u)?;
    let grad_v: Vec<PhysicalField<T>> = v.gradient().iter().map(to_physical).collect::<Result<_>>()?;
    Ok(convective_from_parts(&up, &grad_v))
}

/// (u·∇)v from physical samples of u and of ∂_j v.
pub(crate) fn convective_from_parts<T: Real>(up: &PhysicalField<T>, grad_v: &[PhysicalField<T>]) -> PhysicalField<T> {
    let grid = up.grid();
    let dim = grid.dim();
    let mut out = vec![vec![T::zero(); grid.len()]; dim];
    for (i, comp) in out.iter_mut().enumerate() {
        for (flat, slot) in comp.iter_mut().enumerate() {
            let mut s = T::zero();
            for (j, dv) in grad_v.iter().enumerate() {
                s = s + up.component(j)[flat] * dv.component(i)[flat];
            }
            *slot = s;
        }
    }
    PhysicalField::new(grid.clone(), out).expect("finite products of finite samples")
}

/// |u|^{r−1}u evaluated pointwise; zero where |u| = 0.
pub fn damping_physical<T: Real>(u: &PhysicalField<T>, r: T) -> Result<PhysicalField<T>> {
    check_r(r)?;
    let grid = u.grid();
    let mag = u.magnitude();
    let exponent = r - T::one();
    let weights: Vec<T> = mag
        .iter()
        .map(|&m| if m == T::zero() { T::zero() } else { m.powf(exponent) })
        .collect();
    let out = u
        .components()
        .iter()
        .map(|c| c.iter().zip(&weights).map(|(x, w)| *x * *w).collect())
        .collect();
    PhysicalField::new(grid.clone(), out)
}

impl<T: Real> Operators<T> {
    pub fn new(params: CbfParams<T>) -> Self {
        Self { params, dealias: true }
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn params(&self) -> &CbfParams<T> {
        &self.params
    }

    pub fn dealias_enabled(&self) -> bool {
        self.dealias
    }

    /// Forward transform, optional dealiasing, Leray projection.
    pub fn project_nonlinear(&self, g: &PhysicalField<T>) -> Result<SpectralField<T>> {
        let mut s = to_spectral(g)?;
        if self.dealias {
            s = dealias(&s);
        }
        leray_project(&s)
    }

    /// Stokes operator Au = −Δu (multiplier |k|²).
    pub fn a(&self, u: &SpectralField<T>) -> Result<SpectralField<T>> {
        require_divergence_free(u, "A")?;
        let grid = u.grid();
        Ok(u.map_modes(true, |_, flat, z| z * grid.k_sq(flat)))
    }

    /// B(u, v) = P[(u·∇)v].
    pub fn b(&self, u: &SpectralField<T>, v: &SpectralField<T>) -> Result<SpectralField<T>> {
        require_divergence_free(u, "B")?;
        self.project_nonlinear(&convective_physical(u, v)?)
    }

    /// C(u) = P[|u|^{r−1}u] with the exponent of the parameter set.
    pub fn c(&self, u: &SpectralField<T>) -> Result<SpectralField<T>> {
        self.c_with(u, self.params.r)
    }

    pub fn c_with(&self, u: &SpectralField<T>, r: T) -> Result<SpectralField<T>> {
        check_r(r)?;
        u.require_vector()?;
        self.project_nonlinear(&damping_physical(&to_physical(u)?, r)?)
    }

    /// B(u) + βC(u) through one physical-space evaluation.
    pub fn nonlinear(&self, u: &SpectralField<T>) -> Result<SpectralField<T>> {
        require_divergence_free(u, "the nonlinear term")?;
        let up = to_physical(u)?;
        let grad_u: Vec<PhysicalField<T>> = u.gradient().iter().map(to_physical).collect::<Result<_>>()?;
        let conv = convective_from_parts(&up, &grad_u);
        let beta = self.params.beta;
        if beta == T::zero() {
            return self.project_nonlinear(&conv);
        }
        let damp = damping_physical(&up, self.params.r)?;
        let sum = conv
            .components()
            .iter()
            .zip(damp.components())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x + beta * *y).collect())
            .collect();
        self.project_nonlinear(&PhysicalField::new(u.grid().clone(), sum)?)
    }

    /// G(u) = μAu + αu + B(u) + βC(u).
    pub fn g(&self, u: &SpectralField<T>) -> Result<SpectralField<T>> {
        require_divergence_free(u, "G")?;
        let CbfParams { mu, alpha, .. } = self.params;
        let grid = u.grid();
        let linear = u.map_modes(true, |_, flat, z| z * (mu * grid.k_sq(flat) + alpha));
        linear.add(&self.nonlinear(u)?)
    }

    /// Mean-zero pressure solving Δp = ∇·(f − (u·∇)u − β|u|^{r−1}u).
    pub fn pressure(&self, u: &SpectralField<T>, f: &SpectralField<T>) -> Result<SpectralField<T>> {
        require_divergence_free(u, "pressure recovery")?;
        u.check_compatible(f)?;
        let grid = u.grid();
        let dim = grid.dim();
        let up = to_physical(u)?;
        let grad_u: Vec<PhysicalField<T>> = u.gradient().iter().map(to_physical).collect::<Result<_>>()?;
        let conv = convective_from_parts(&up, &grad_u);
        let damp = damping_physical(&up, self.params.r)?;
        let beta = self.params.beta;
        let rhs = conv
            .components()
            .iter()
            .zip(damp.components())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| -*x - beta * *y).collect())
            .collect();
        let mut g = to_spectral(&PhysicalField::new(grid.clone(), rhs)?)?;
        if self.dealias {
            g = dealias(&g);
        }
        let g = g.add(f)?;
        let coefficients = (0..grid.len())
            .map(|flat| {
                let kd = grid.derivative_wavevector(flat);
                let ksq: T = kd[..dim].iter().map(|v| *v * *v).sum();
                if ksq == T::zero() {
                    return czero();
                }
                let mut dot = czero::<T>();
                for a in 0..dim {
                    dot = dot + g.component(a)[flat] * kd[a];
                }
                // p̂ = −i k·ĝ / |k|²
                Complex::new(dot.im, -dot.re) / ksq
            })
            .collect();
        Ok(SpectralField::from_parts(grid.clone(), vec![coefficients], false))
    }
}

/// Au for divergence-free u.
pub fn op_a<T: Real>(u: &SpectralField<T>) -> Result<SpectralField<T>> {
    require_divergence_free(u, "A")?;
    let grid = u.grid();
    Ok(u.map_modes(true, |_, flat, z| z * grid.k_sq(flat)))
}

/// B(u, v) with dealiasing.
pub fn op_b<T: Real>(u: &SpectralField<T>, v: &SpectralField<T>) -> Result<SpectralField<T>> {
    require_divergence_free(u, "B")?;
    let mut s = to_spectral(&convective_physical(u, v)?)?;
    s = dealias(&s);
    leray_project(&s)
}

/// C(u) = P[|u|^{r−1}u] with dealiasing.
pub fn op_c<T: Real>(u: &SpectralField<T>, r: T) -> Result<SpectralField<T>> {
    check_r(r)?;
    u.require_vector()?;
    let s = to_spectral(&damping_physical(&to_physical(u)?, r)?)?;
    leray_project(&dealias(&s))
}

/// G(u) = μAu + αu + B(u) + βC(u) with dealiasing.
pub fn op_g<T: Real>(u: &SpectralField<T>, params: &CbfParams<T>) -> Result<SpectralField<T>> {
    Operators::new(*params).g(u)
}

/// b(u, v, w) = ∫ (u·∇)v·w by grid quadrature (no dealiasing, no
/// projection).
pub fn trilinear_b<T: Real>(u: &SpectralField<T>, v: &SpectralField<T>, w: &SpectralField<T>) -> Result<T> {
    u.check_compatible(w)?;
    physical_pairing(&convective_physical(u, v)?, &to_physical(w)?)
}

/// Mean-zero pressure with dealiasing.
pub fn recover_pressure<T: Real>(
    u: &SpectralField<T>,
    f: &SpectralField<T>,
    params: &CbfParams<T>,
) -> Result<SpectralField<T>> {
    Operators::new(*params).pressure(u, f)
}

/// ⟨G(u), u⟩ assembled from the individual pairings.
pub fn g_pairing_decomposed<T: Real>(ops: &Operators<T>, u: &SpectralField<T>) -> Result<(T, T, T, T)> {
    let p = ops.params();
    let a = duality_pairing(&ops.a(u)?, u)?;
    let b = duality_pairing(&ops.b(u, u)?, u)?;
    let c = duality_pairing(&ops.c(u)?, u)?;
    Ok((p.mu * a, p.alpha * u.norm_h_sq(), b, p.beta * c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{PhysicalField, TorusGrid};

    fn tg(g: &TorusGrid<f64>) -> SpectralField<f64> {
        PhysicalField::from_fn(g, |x| vec![x[0].cos() * x[1].sin(), -x[0].sin() * x[1].cos()])
            .unwrap()
            .to_spectral()
            .unwrap()
            .leray_project()
            .unwrap()
    }

    #[test]
    fn a_requires_certificate() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 16).unwrap();
        let raw = PhysicalField::from_fn(&g, |x| vec![x[0].sin(), 0.0]).unwrap();
        let s = raw.to_spectral().unwrap();
        assert!(matches!(op_a(&s), Err(CbfError::ContractViolation(_))));
    }

    #[test]
    fn taylor_green_convection_is_a_gradient() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 32).unwrap();
        let u = tg(&g);
        let b = op_b(&u, &u).unwrap();
        assert!(b.max_abs_coefficient() < 1e-15);
    }

    #[test]
    fn taylor_green_pressure() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 32).unwrap();
        let u = tg(&g);
        let params = CbfParams::new(0.1, 0.0, 0.0, 3.0).unwrap();
        let p = recover_pressure(&u, &SpectralField::zeros(&g), &params).unwrap();
        let p = p.to_physical().unwrap();
        let expect = PhysicalField::scalar_from_fn(&g, |x| -((2.0 * x[0]).cos() + (2.0 * x[1]).cos()) / 4.0).unwrap();
        assert!(p.max_abs_diff(&expect).unwrap() < 1e-14);
    }

    #[test]
    fn damping_of_constant_field() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 16).unwrap();
        let u = PhysicalField::from_fn(&g, |_| vec![3.0, 4.0])
            .unwrap()
            .to_spectral()
            .unwrap()
            .leray_project()
            .unwrap();
        let c = op_c(&u, 3.0).unwrap();
        assert!((c.component(0)[0].re - 75.0).abs() < 1e-12);
        assert!((c.component(1)[0].re - 100.0).abs() < 1e-12);
        assert!(op_c(&u, 0.5).is_err());
    }
}
