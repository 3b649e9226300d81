use num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;
use crate::spectral::field::{PhysicalField, SpectralField};

/// Forward transform: û(k) = N^{−d} Σ_x u(x) e^{−ik·x}.
pub fn to_spectral<T: Real>(field: &PhysicalField<T>) -> Result<SpectralField<T>> {
    let grid = field.grid();
    // `PhysicalField` construction already rejects non-finite samples.
    let norm = T::one() / T::from_usize_lossy(grid.len());
    let mut coefficients = Vec::with_capacity(field.n_components());
    for comp in field.components() {
        let mut data: Vec<Complex<T>> = comp.iter().map(|&v| Complex::new(v, T::zero())).collect();
        grid.transform_all_axes(&mut data, grid.fft_forward());
        for z in &mut data {
            *z = *z * norm;
        }
        coefficients.push(data);
    }
    let mut out = SpectralField::new(grid.clone(), coefficients)?;
    out.symmetrize();
    Ok(out)
}

/// Inverse transform. Fails with a symmetry-violation error when the
/// coefficients are not Hermitian (the field would not be real).
pub fn to_physical<T: Real>(field: &SpectralField<T>) -> Result<PhysicalField<T>> {
    field.check_hermitian()?;
    let grid = field.grid();
    let components = field
        .coefficients()
        .iter()
        .map(|comp| {
            let mut data = comp.clone();
            grid.transform_all_axes(&mut data, grid.fft_inverse());
            data.into_iter().map(|z| z.re).collect()
        })
        .collect();
    PhysicalField::new(grid.clone(), components)
}

impl<T: Real> PhysicalField<T> {
    pub fn to_spectral(&self) -> Result<SpectralField<T>> {
        to_spectral(self)
    }
}

impl<T: Real> SpectralField<T> {
    pub fn to_physical(&self) -> Result<PhysicalField<T>> {
        to_physical(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::TorusGrid;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_has_only_mean_mode() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 8).unwrap();
        let u = PhysicalField::from_fn(&g, |_| vec![2.5, -1.0]).unwrap();
        let s = u.to_spectral().unwrap();
        for flat in 1..g.len() {
            assert!(s.component(0)[flat].norm() < 1e-15);
        }
        assert!((s.component(0)[0].re - 2.5).abs() < 1e-15);
        assert!((s.component(1)[0].re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn sine_has_two_conjugate_coefficients() {
        let g = TorusGrid::<f64>::new(2, 16, 3.0).unwrap();
        let u = PhysicalField::from_fn(&g, |x| vec![(2.0 * PI * x[0] / 3.0).sin(), 0.0]).unwrap();
        let s = u.to_spectral().unwrap();
        let plus = s.mode(0, &[1, 0]);
        let minus = s.mode(0, &[-1, 0]);
        assert!((plus - Complex::new(0.0, -0.5)).norm() < 1e-15);
        assert!((minus - Complex::new(0.0, 0.5)).norm() < 1e-15);
        let total: f64 = s.component(0).iter().map(|z| z.norm()).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn broken_symmetry_is_rejected() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 8).unwrap();
        let mut s = SpectralField::zeros(&g);
        let idx = g.index_of_mode(&[1, 1]);
        s.coefficients_mut()[0][idx] = Complex::new(1.0, 0.0);
        assert!(matches!(
            s.to_physical(),
            Err(crate::error::CbfError::SymmetryViolation { .. })
        ));
    }
}
