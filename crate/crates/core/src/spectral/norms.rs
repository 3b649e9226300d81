use crate::error::{CbfError, Result};
use crate::scalar::Real;
use crate::spectral::field::{PhysicalField, SpectralField};

/// L^d Σ_k w(k)|û(k)|², the Plancherel sum with a per-mode weight.
fn weighted_sum<T: Real>(u: &SpectralField<T>, w: impl Fn(usize) -> T) -> T {
    let grid = u.grid();
    let mut total = T::zero();
    for comp in u.coefficients() {
        for (flat, z) in comp.iter().enumerate() {
            total = total + w(flat) * z.norm_sqr();
        }
    }
    total * grid.volume()
}

/// ‖u‖_H² = ∫|u|².
pub fn norm_h_sq<T: Real>(u: &SpectralField<T>) -> T {
    weighted_sum(u, |_| T::one())
}

pub fn norm_h<T: Real>(u: &SpectralField<T>) -> T {
    norm_h_sq(u).sqrt()
}

/// ‖∇u‖_H² = Σ|k|²|û|²·L^d.
pub fn seminorm_grad_sq<T: Real>(u: &SpectralField<T>) -> T {
    let grid = u.grid();
    weighted_sum(u, |flat| grid.k_sq(flat))
}

pub fn seminorm_grad<T: Real>(u: &SpectralField<T>) -> T {
    seminorm_grad_sq(u).sqrt()
}

/// Full H¹ norm squared, ‖u‖² + ‖∇u‖².
pub fn norm_v_sq<T: Real>(u: &SpectralField<T>) -> T {
    let grid = u.grid();
    weighted_sum(u, |flat| T::one() + grid.k_sq(flat))
}

pub fn norm_v<T: Real>(u: &SpectralField<T>) -> T {
    norm_v_sq(u).sqrt()
}

/// ‖f‖_{V′}² = Σ|f̂|²/(1 + |k|²)·L^d.
pub fn norm_v_dual_sq<T: Real>(u: &SpectralField<T>) -> T {
    let grid = u.grid();
    weighted_sum(u, |flat| T::one() / (T::one() + grid.k_sq(flat)))
}

pub fn norm_v_dual<T: Real>(u: &SpectralField<T>) -> T {
    norm_v_dual_sq(u).sqrt()
}

/// ‖Au‖_H² = Σ|k|⁴|û|²·L^d.
pub fn a_norm_sq<T: Real>(u: &SpectralField<T>) -> T {
    let grid = u.grid();
    weighted_sum(u, |flat| grid.k_sq(flat) * grid.k_sq(flat))
}

fn check_exponent<T: Real>(p: T) -> Result<()> {
    if !(p >= T::one() && p.is_finite()) {
        return Err(CbfError::InvalidExponent(p.to_f64_lossy()));
    }
    Ok(())
}

/// ∫|u|^p by equal-weight grid quadrature.
pub fn lp_integral_physical<T: Real>(u: &PhysicalField<T>, p: T) -> Result<T> {
    check_exponent(p)?;
    Ok(PhysicalField::integrate(
        u.grid(),
        u.magnitude().into_iter().map(|m| m.powf(p)),
    ))
}

/// ‖u‖_{L^p} by equal-weight grid quadrature.
pub fn norm_lp_physical<T: Real>(u: &PhysicalField<T>, p: T) -> Result<T> {
    Ok(lp_integral_physical(u, p)?.powf(T::one() / p))
}

/// ‖u‖_{L^p}; the field is transformed to physical space first.
pub fn norm_lp<T: Real>(u: &SpectralField<T>, p: T) -> Result<T> {
    check_exponent(p)?;
    norm_lp_physical(&u.to_physical()?, p)
}

/// ∫|u|^p; the field is transformed to physical space first.
pub fn lp_integral<T: Real>(u: &SpectralField<T>, p: T) -> Result<T> {
    check_exponent(p)?;
    lp_integral_physical(&u.to_physical()?, p)
}

/// ∫ f·u = L^d Σ_k Re(f̂(k)·conj(û(k))).
pub fn duality_pairing<T: Real>(f: &SpectralField<T>, u: &SpectralField<T>) -> Result<T> {
    f.check_compatible(u)?;
    let mut total = T::zero();
    for (a, b) in f.coefficients().iter().zip(u.coefficients()) {
        for (x, y) in a.iter().zip(b) {
            total = total + x.re * y.re + x.im * y.im;
        }
    }
    Ok(total * f.grid().volume())
}

/// ∫ f·u by grid quadrature.
pub fn physical_pairing<T: Real>(f: &PhysicalField<T>, u: &PhysicalField<T>) -> Result<T> {
    f.check_compatible(u)?;
    let total = f
        .components()
        .iter()
        .zip(u.components())
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x * *y).sum::<T>())
        .sum::<T>();
    Ok(total * f.grid().cell_volume())
}

impl<T: Real> SpectralField<T> {
    pub fn norm_h(&self) -> T {
        norm_h(self)
    }

    pub fn norm_h_sq(&self) -> T {
        norm_h_sq(self)
    }

    pub fn norm_v(&self) -> T {
        norm_v(self)
    }

    pub fn seminorm_grad(&self) -> T {
        seminorm_grad(self)
    }

    pub fn norm_v_dual(&self) -> T {
        norm_v_dual(self)
    }

    pub fn norm_lp(&self, p: T) -> Result<T> {
        norm_lp(self, p)
    }

    pub fn pairing(&self, other: &Self) -> Result<T> {
        duality_pairing(self, other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::TorusGrid;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_norm() {
        let g = TorusGrid::<f64>::new(3, 8, 1.7).unwrap();
        let u = PhysicalField::from_fn(&g, |_| vec![3.0, 0.0, -4.0]).unwrap();
        let s = u.to_spectral().unwrap();
        let expect = 5.0 * (1.7f64.powi(3)).sqrt();
        assert!((norm_h(&s) - expect).abs() < 1e-12 * expect);
        assert!(seminorm_grad(&s).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_exponent() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 8).unwrap();
        let s = SpectralField::zeros(&g);
        assert!(matches!(norm_lp(&s, 0.5), Err(CbfError::InvalidExponent(_))));
    }

    #[test]
    fn sin_fourth_power_integral() {
        let l = 2.5;
        let g = TorusGrid::<f64>::new(2, 16, l).unwrap();
        let u = PhysicalField::from_fn(&g, |x| vec![(2.0 * PI * x[0] / l).sin(), 0.0]).unwrap();
        let s = u.to_spectral().unwrap();
        let i4 = lp_integral(&s, 4.0).unwrap();
        assert!((i4 - 0.375 * l * l).abs() < 1e-12);
    }
}
