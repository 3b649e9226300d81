use std::path::PathBuf;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{CbfError, Result};
use crate::scalar::Real;
use crate::spectral::snapshot::read_snapshot;
use crate::spectral::{czero, leray_project, PhysicalField, SpectralField, TorusGrid};

/// Named initial-condition families.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition<T: Real> {
    Zero,
    /// 2-D: A(cos x sin y, −sin x cos y); 3-D: A(sin x cos y cos z,
    /// −cos x sin y cos z, 0). Coordinates are scaled by 2π/L.
    TaylorGreen {
        amplitude: T,
    },
    /// Gaussian coefficients in the box |m_i| ≤ band_limit with magnitudes
    /// decaying like |k|^{−slope}, projected and scaled to the given rms.
    RandomBandLimited {
        seed: u64,
        band_limit: usize,
        slope: T,
        amplitude: T,
        mean_free: bool,
    },
    /// amplitude · sin(k·x) · e, with e ⊥ k a unit vector.
    SingleMode {
        mode: Vec<i64>,
        amplitude: T,
    },
    Snapshot(PathBuf),
    Field(SpectralField<T>),
}

impl<T: Real> InitialCondition<T> {
    pub fn build(&self, grid: &TorusGrid<T>) -> Result<SpectralField<T>> {
        match self {
            InitialCondition::Zero => Ok(SpectralField::zeros(grid)),
            InitialCondition::TaylorGreen { amplitude } => taylor_green(grid, *amplitude),
            InitialCondition::RandomBandLimited {
                seed,
                band_limit,
                slope,
                amplitude,
                mean_free,
            } => random_band_limited(grid, *seed, *band_limit, *slope, *amplitude, *mean_free),
            InitialCondition::SingleMode { mode, amplitude } => single_mode(grid, mode, *amplitude),
            InitialCondition::Snapshot(path) => {
                let (_, field) = read_snapshot::<T>(path)?;
                if field.grid() != grid {
                    return Err(CbfError::Configuration(format!(
                        "snapshot {} was written on a different grid",
                        path.display()
                    )));
                }
                leray_project(&field)
            }
            InitialCondition::Field(f) => {
                if f.grid() != grid {
                    return Err(CbfError::IncompatibleGrids);
                }
                leray_project(f)
            }
        }
    }
}

/// The Taylor–Green vortex at unit wavenumber.
pub fn taylor_green<T: Real>(grid: &TorusGrid<T>, amplitude: T) -> Result<SpectralField<T>> {
    let k0 = grid.k0();
    let field = if grid.dim() == 2 {
        PhysicalField::from_fn(grid, |x| {
            let (a, b) = (k0 * x[0], k0 * x[1]);
            vec![amplitude * a.cos() * b.sin(), -amplitude * a.sin() * b.cos()]
        })?
    } else {
        PhysicalField::from_fn(grid, |x| {
            let (a, b, c) = (k0 * x[0], k0 * x[1], k0 * x[2]);
            vec![
                amplitude * a.sin() * b.cos() * c.cos(),
                -amplitude * a.cos() * b.sin() * c.cos(),
                T::zero(),
            ]
        })?
    };
    leray_project(&field.to_spectral()?)
}

/// Exact 2-D Taylor–Green solution of the unforced Navier–Stokes equations
/// at time `t`, sampled on the grid.
pub fn taylor_green_exact<T: Real>(grid: &TorusGrid<T>, amplitude: T, mu: T, t: T) -> Result<PhysicalField<T>> {
    let k0 = grid.k0();
    let decay = amplitude * (-T::lit(2.0) * mu * k0 * k0 * t).exp();
    PhysicalField::from_fn(grid, |x| {
        let (a, b) = (k0 * x[0], k0 * x[1]);
        vec![decay * a.cos() * b.sin(), -decay * a.sin() * b.cos()]
    })
}

/// amplitude · sin(k·x) · e with e a unit vector orthogonal to k.
pub fn single_mode<T: Real>(grid: &TorusGrid<T>, mode: &[i64], amplitude: T) -> Result<SpectralField<T>> {
    let dim = grid.dim();
    if mode.len() != dim || mode.iter().all(|&m| m == 0) {
        return Err(CbfError::InvalidArguments(format!(
            "single_mode needs a nonzero mode with {dim} entries, got {mode:?}"
        )));
    }
    let m: Vec<T> = mode.iter().map(|&v| T::lit(v as f64)).collect();
    let mut e = if dim == 2 {
        vec![-m[1], m[0]]
    } else {
        // Cross with the coordinate axis least aligned with m.
        let axis = (0..3)
            .min_by(|&i, &j| m[i].abs().partial_cmp(&m[j].abs()).unwrap())
            .unwrap();
        let mut a = [T::zero(); 3];
        a[axis] = T::one();
        vec![
            m[1] * a[2] - m[2] * a[1],
            m[2] * a[0] - m[0] * a[2],
            m[0] * a[1] - m[1] * a[0],
        ]
    };
    let norm = e.iter().map(|v| *v * *v).sum::<T>().sqrt();
    for v in &mut e {
        *v = *v / norm;
    }
    // sin θ = (e^{iθ} − e^{−iθ})/(2i): coefficient −i·A/2 at +k.
    let half = amplitude * T::lit(0.5);
    let amp: Vec<Complex<T>> = e.iter().map(|v| Complex::new(T::zero(), -half * *v)).collect();
    SpectralField::single_mode(grid, mode, &amp)?.certify_divergence_free()
}

/// Seeded random divergence-free field supported in the box
/// |m_i| ≤ band_limit, rescaled so that ‖u‖_H/√(L^d) = amplitude.
pub fn random_band_limited<T: Real>(
    grid: &TorusGrid<T>,
    seed: u64,
    band_limit: usize,
    slope: T,
    amplitude: T,
    mean_free: bool,
) -> Result<SpectralField<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_with_rng(grid, &mut rng, band_limit, slope, amplitude, mean_free)
}

pub(crate) fn random_with_rng<T: Real>(
    grid: &TorusGrid<T>,
    rng: &mut impl Rng,
    band_limit: usize,
    slope: T,
    amplitude: T,
    mean_free: bool,
) -> Result<SpectralField<T>> {
    let half = grid.n_points() / 2;
    if band_limit == 0 || band_limit >= half {
        return Err(CbfError::InvalidArguments(format!(
            "band_limit must be in 1..{half}, got {band_limit}"
        )));
    }
    let dim = grid.dim();
    let mut coefficients = vec![vec![czero::<T>(); grid.len()]; dim];
    for flat in 0..grid.len() {
        // Draw for every mode so the stream does not depend on the band.
        let draws: Vec<(f64, f64)> = (0..dim)
            .map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if grid.max_abs_mode(flat) > band_limit as u64 {
            continue;
        }
        let ksq = grid.k_sq(flat);
        if ksq == T::zero() && mean_free {
            continue;
        }
        let weight = if ksq == T::zero() {
            T::one()
        } else {
            ksq.powf(-slope / T::lit(2.0))
        };
        for (c, (re, im)) in draws.into_iter().enumerate() {
            coefficients[c][flat] = Complex::new(T::lit(re), T::lit(im)) * weight;
        }
    }
    let mut field = SpectralField::new(grid.clone(), coefficients)?;
    field.symmetrize();
    let field = leray_project(&field)?;
    let rms = (field.norm_h_sq() / grid.volume()).sqrt();
    if rms == T::zero() {
        return Ok(field);
    }
    Ok(field.scale(amplitude / rms))
}
