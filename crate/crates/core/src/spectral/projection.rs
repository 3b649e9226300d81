use crate::error::{CbfError, Result};
use crate::scalar::Real;
use crate::spectral::field::{czero, SpectralField};

/// Shape of the retained index set for Galerkin truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TruncationShape {
    /// The index box [−n, n]^d.
    #[default]
    Box,
    /// The ball |m| ≤ n.
    Ball,
}

/// Leray projection û(k) ← (I − k kᵀ/|k|²) û(k); the mean mode is left
/// untouched.
pub fn leray_project<T: Real>(u: &SpectralField<T>) -> Result<SpectralField<T>> {
    u.require_vector()?;
    let grid = u.grid();
    let dim = grid.dim();
    let mut out = u.clone();
    {
        let coeffs = out.coefficients_mut();
        for flat in 0..grid.len() {
            let k = grid.derivative_wavevector(flat);
            let ksq: T = k[..dim].iter().map(|v| *v * *v).sum();
            if ksq == T::zero() {
                continue;
            }
            let mut dot = czero::<T>();
            for a in 0..dim {
                dot = dot + coeffs[a][flat] * k[a];
            }
            let dot = dot / ksq;
            for a in 0..dim {
                coeffs[a][flat] = coeffs[a][flat] - dot * k[a];
            }
        }
    }
    out.set_divergence_free(true);
    Ok(out)
}

/// Zeroes every mode with some |m_i| > ⌊n/3⌋ (the 2/3 rule).
pub fn dealias<T: Real>(u: &SpectralField<T>) -> SpectralField<T> {
    let grid = u.grid();
    let cutoff = grid.dealias_cutoff();
    u.map_modes(u.is_divergence_free(), |_, flat, z| {
        if grid.max_abs_mode(flat) > cutoff {
            czero()
        } else {
            z
        }
    })
}

/// Box truncation R_n onto the index box [−n, n]^d.
pub fn galerkin_truncate<T: Real>(u: &SpectralField<T>, n: usize) -> SpectralField<T> {
    truncate_with(u, n, TruncationShape::Box)
}

/// Truncation onto either the index box or the ball of radius `n`.
pub fn truncate_with<T: Real>(u: &SpectralField<T>, n: usize, shape: TruncationShape) -> SpectralField<T> {
    let grid = u.grid();
    let dim = grid.dim();
    let n2 = (n as i64) * (n as i64);
    u.map_modes(u.is_divergence_free(), |_, flat, z| {
        let keep = match shape {
            TruncationShape::Box => grid.max_abs_mode(flat) <= n as u64,
            TruncationShape::Ball => grid.modes(flat)[..dim].iter().map(|m| m * m).sum::<i64>() <= n2,
        };
        if keep {
            z
        } else {
            czero()
        }
    })
}

/// The eigenspace filter P_{1/n}: multiplies the mode k by e^{−|k|²/n}
/// when |k|² < n², and zeroes it otherwise.
pub fn exp_filter<T: Real>(u: &SpectralField<T>, n: T) -> Result<SpectralField<T>> {
    if !(n.is_finite() && n > T::zero()) {
        return Err(CbfError::InvalidParameter {
            name: "n",
            reason: format!("filter parameter must be positive, got {n}"),
        });
    }
    let grid = u.grid();
    let n_sq = n * n;
    Ok(u.map_modes(u.is_divergence_free(), |_, flat, z| {
        let lambda = grid.k_sq(flat);
        if lambda < n_sq {
            z * (-lambda / n).exp()
        } else {
            czero()
        }
    }))
}

impl<T: Real> SpectralField<T> {
    pub fn leray_project(&self) -> Result<SpectralField<T>> {
        leray_project(self)
    }

    pub fn dealias(&self) -> SpectralField<T> {
        dealias(self)
    }

    pub fn galerkin_truncate(&self, n: usize) -> SpectralField<T> {
        galerkin_truncate(self, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::PhysicalField;
    use crate::spectral::grid::TorusGrid;

    #[test]
    fn gradient_field_is_annihilated() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 16).unwrap();
        let grad_q = PhysicalField::from_fn(&g, |x| {
            // q = sin x cos 2y
            vec![x[0].cos() * (2.0 * x[1]).cos(), -2.0 * x[0].sin() * (2.0 * x[1]).sin()]
        })
        .unwrap();
        let p = leray_project(&grad_q.to_spectral().unwrap()).unwrap();
        assert!(p.max_abs_coefficient() < 1e-15);
        assert!(p.is_divergence_free());
    }

    #[test]
    fn truncation_extremes() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 8).unwrap();
        let u = PhysicalField::from_fn(&g, |x| vec![1.0 + x[0].sin(), (3.0 * x[1]).cos()]).unwrap();
        let s = u.to_spectral().unwrap();
        assert_eq!(galerkin_truncate(&s, 4), s);
        let mean_only = galerkin_truncate(&s, 0);
        assert!((mean_only.component(0)[0].re - 1.0).abs() < 1e-15);
        assert!(mean_only.component(0)[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn ball_is_inside_box() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 16).unwrap();
        let u = PhysicalField::from_fn(&g, |x| vec![(3.0 * x[0] + 3.0 * x[1]).sin(), 0.0]).unwrap();
        let s = u.to_spectral().unwrap();
        // |(3,3)| ≈ 4.24: kept by the box of radius 3, dropped by the ball.
        assert!(truncate_with(&s, 3, TruncationShape::Box).max_abs_coefficient() > 0.4);
        assert!(truncate_with(&s, 3, TruncationShape::Ball).max_abs_coefficient() < 1e-15);
    }
}
