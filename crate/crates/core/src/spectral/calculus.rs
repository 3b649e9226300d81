use num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;
use crate::spectral::field::SpectralField;

/// ∂u/∂x_j for every axis j. Entry `j` has the same component layout as `u`.
pub fn gradient<T: Real>(u: &SpectralField<T>) -> Vec<SpectralField<T>> {
    let grid = u.grid();
    (0..grid.dim())
        .map(|j| {
            u.map_modes(false, |_, flat, z| {
                let kj = grid.derivative_wavevector(flat)[j];
                Complex::new(-z.im * kj, z.re * kj)
            })
        })
        .collect()
}

/// ∇·u as a scalar field.
pub fn divergence<T: Real>(u: &SpectralField<T>) -> Result<SpectralField<T>> {
    u.require_vector()?;
    let grid = u.grid();
    let dim = grid.dim();
    let coefficients = (0..grid.len())
        .map(|flat| {
            let kd = grid.derivative_wavevector(flat);
            let mut s = Complex::new(T::zero(), T::zero());
            for a in 0..dim {
                s = s + u.component(a)[flat] * kd[a];
            }
            Complex::new(-s.im, s.re)
        })
        .collect();
    Ok(SpectralField::from_parts(grid.clone(), vec![coefficients], false))
}

/// Δu, multiplier −|k|².
pub fn laplacian<T: Real>(u: &SpectralField<T>) -> SpectralField<T> {
    let grid = u.grid();
    u.map_modes(u.is_divergence_free(), |_, flat, z| z * (-grid.k_sq(flat)))
}

/// Gradient of a scalar field as a vector field.
pub fn scalar_gradient<T: Real>(q: &SpectralField<T>) -> Result<SpectralField<T>> {
    if q.n_components() != 1 {
        return Err(crate::error::CbfError::InvalidField(format!(
            "expected a scalar field, got {} components",
            q.n_components()
        )));
    }
    let parts: Vec<_> = gradient(q)
        .into_iter()
        .map(|g| g.into_coefficients().remove(0))
        .collect();
    Ok(SpectralField::from_parts(q.grid().clone(), parts, false))
}

/// Scalar curl ∂₁u₂ − ∂₂u₁ of a 2-D field (the vorticity).
pub fn curl_2d<T: Real>(u: &SpectralField<T>) -> Result<SpectralField<T>> {
    u.require_vector()?;
    let grid = u.grid();
    if grid.dim() != 2 {
        return Err(crate::error::CbfError::InvalidField("curl_2d needs a 2-D grid".into()));
    }
    let coefficients = (0..grid.len())
        .map(|flat| {
            let kd = grid.derivative_wavevector(flat);
            let s = u.component(1)[flat] * kd[0] - u.component(0)[flat] * kd[1];
            Complex::new(-s.im, s.re)
        })
        .collect();
    Ok(SpectralField::from_parts(grid.clone(), vec![coefficients], false))
}

impl<T: Real> SpectralField<T> {
    pub fn gradient(&self) -> Vec<SpectralField<T>> {
        gradient(self)
    }

    pub fn divergence(&self) -> Result<SpectralField<T>> {
        divergence(self)
    }

    pub fn laplacian(&self) -> SpectralField<T> {
        laplacian(self)
    }
}
