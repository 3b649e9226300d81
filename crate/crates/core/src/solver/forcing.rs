use crate::error::{CbfError, Result};
use crate::scalar::Real;
use crate::spectral::{leray_project, PhysicalField, SpectralField, TorusGrid};

/// Named analytic forcing families.
#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticForcing<T: Real> {
    /// f = A (sin(k k₀ y), 0, …): a shear (Kolmogorov) forcing.
    Kolmogorov { amplitude: T, wavenumber: u32 },
    /// f = A (cos x sin y, −sin x cos y) scaled to the fundamental
    /// wavenumber; 2-D only.
    TaylorGreen { amplitude: T },
    /// Kolmogorov forcing modulated in time by cos(ωt).
    Oscillating { amplitude: T, wavenumber: u32, omega: T },
}

/// Forcing f(t). Every evaluation is Leray-projected before it reaches the
/// solver.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum ForcingSpec<T: Real> {
    #[default]
    Zero,
    Steady(SpectralField<T>),
    Analytic(AnalyticForcing<T>),
}

impl<T: Real> ForcingSpec<T> {
    pub fn is_zero(&self) -> bool {
        matches!(self, ForcingSpec::Zero)
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self, ForcingSpec::Analytic(AnalyticForcing::Oscillating { .. }))
    }

    /// Projected forcing field at time `t`.
    pub fn evaluate(&self, grid: &TorusGrid<T>, t: T) -> Result<SpectralField<T>> {
        match self {
            ForcingSpec::Zero => Ok(SpectralField::zeros(grid)),
            ForcingSpec::Steady(f) => {
                if f.grid() != grid {
                    return Err(CbfError::IncompatibleGrids);
                }
                leray_project(f)
            }
            ForcingSpec::Analytic(a) => a.evaluate(grid, t),
        }
    }
}

impl<T: Real> AnalyticForcing<T> {
    pub fn evaluate(&self, grid: &TorusGrid<T>, t: T) -> Result<SpectralField<T>> {
        let k0 = grid.k0();
        let dim = grid.dim();
        let kolmogorov = |amp: T, k: u32| {
            let kk = k0 * T::lit(k as f64);
            PhysicalField::from_fn(grid, |x| {
                let mut v = vec![T::zero(); dim];
                v[0] = amp * (kk * x[1]).sin();
                v
            })
        };
        let field = match *self {
            AnalyticForcing::Kolmogorov { amplitude, wavenumber } => kolmogorov(amplitude, wavenumber)?,
            AnalyticForcing::Oscillating {
                amplitude,
                wavenumber,
                omega,
            } => kolmogorov(amplitude * (omega * t).cos(), wavenumber)?,
            AnalyticForcing::TaylorGreen { amplitude } => {
                if dim != 2 {
                    return Err(CbfError::InvalidArguments(
                        "taylor_green forcing is defined in 2-D only".into(),
                    ));
                }
                PhysicalField::from_fn(grid, |x| {
                    let (a, b) = (k0 * x[0], k0 * x[1]);
                    vec![amplitude * a.cos() * b.sin(), -amplitude * a.sin() * b.cos()]
                })?
            }
        };
        leray_project(&field.to_spectral()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_is_divergence_free_single_mode() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 16).unwrap();
        let f = ForcingSpec::Analytic(AnalyticForcing::Kolmogorov {
            amplitude: 2.0,
            wavenumber: 3,
        })
        .evaluate(&g, 0.0)
        .unwrap();
        assert!(f.is_divergence_free());
        assert!((f.mode(0, &[0, 3]).im + 1.0).abs() < 1e-14);
    }

    #[test]
    fn oscillating_vanishes_at_quarter_period() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 16).unwrap();
        let spec = ForcingSpec::Analytic(AnalyticForcing::Oscillating {
            amplitude: 1.0,
            wavenumber: 1,
            omega: 2.0,
        });
        let f = spec.evaluate(&g, std::f64::consts::FRAC_PI_4).unwrap();
        assert!(f.max_abs_coefficient() < 1e-15);
        assert!(spec.is_time_dependent());
    }
}
