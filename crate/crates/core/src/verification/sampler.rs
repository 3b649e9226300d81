use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CbfError, Result};
use crate::scalar::Real;
use crate::solver::random_with_rng;
use crate::spectral::{SpectralField, TorusGrid};

/// How the two fields of a pair relate.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum PairMode<T: Real> {
    /// Two independent draws.
    #[default]
    Independent,
    /// v is a regular draw and u = v + w, with w drawn in the box
    /// |m_i| ≤ band_limit at rms `relative_size` times the rms of v.
    Perturbed { band_limit: usize, relative_size: T },
}

/// Seeded generator of divergence-free, band-limited test fields.
///
/// Sample `i` is drawn from a ChaCha8 stream seeded with `seed + i`, so any
/// sample can be regenerated from its seed alone via [`FieldSampler::fields`].
#[derive(Clone, Debug)]
pub struct FieldSampler<T: Real> {
    pub grid: TorusGrid<T>,
    pub seed: u64,
    /// Coefficients are supported in the box |m_i| ≤ band_limit.
    pub band_limit: usize,
    /// Coefficient magnitudes decay like |k|^{−slope}.
    pub spectrum_slope: T,
    /// Base rms amplitude.
    pub amplitude: T,
    /// Each field's amplitude is multiplied by a log-uniform factor in
    /// [1/spread, spread]; 1 disables the variation.
    pub amplitude_spread: T,
    pub mean_free: bool,
    pub pair_mode: PairMode<T>,
    /// Keep a per-sample record in every report built from this sampler.
    pub record_details: bool,
}

const PERTURBATION_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

impl<T: Real> FieldSampler<T> {
    pub fn new(grid: &TorusGrid<T>, seed: u64, band_limit: usize) -> Result<Self> {
        let s = Self {
            grid: grid.clone(),
            seed,
            band_limit,
            spectrum_slope: T::one(),
            amplitude: T::one(),
            amplitude_spread: T::lit(4.0),
            mean_free: false,
            record_details: false,
            pair_mode: PairMode::Independent,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_slope(mut self, slope: T) -> Self {
        self.spectrum_slope = slope;
        self
    }

    pub fn with_amplitude(mut self, amplitude: T, spread: T) -> Self {
        self.amplitude = amplitude;
        self.amplitude_spread = spread;
        self
    }

    pub fn with_mean_free(mut self, mean_free: bool) -> Self {
        self.mean_free = mean_free;
        self
    }

    pub fn with_pair_mode(mut self, mode: PairMode<T>) -> Self {
        self.pair_mode = mode;
        self
    }

    pub fn with_details(mut self, record: bool) -> Self {
        self.record_details = record;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let half = self.grid.n_points() / 2;
        if self.band_limit == 0 || self.band_limit >= half {
            return Err(CbfError::InvalidArguments(format!(
                "band_limit must be in 1..{half}, got {}",
                self.band_limit
            )));
        }
        if !(self.amplitude >= T::zero() && self.amplitude.is_finite()) {
            return Err(CbfError::InvalidArguments(format!(
                "amplitude must be non-negative, got {}",
                self.amplitude
            )));
        }
        if !(self.amplitude_spread >= T::one() && self.amplitude_spread.is_finite()) {
            return Err(CbfError::InvalidArguments(format!(
                "amplitude_spread must be ≥ 1, got {}",
                self.amplitude_spread
            )));
        }
        if let PairMode::Perturbed {
            band_limit,
            relative_size,
        } = self.pair_mode
        {
            if band_limit == 0 || band_limit >= half || !(relative_size > T::zero() && relative_size.is_finite()) {
                return Err(CbfError::InvalidArguments(format!(
                    "perturbation needs band_limit in 1..{half} and a positive size, got {band_limit} and {relative_size}"
                )));
            }
        }
        Ok(())
    }

    /// Seed of the i-th sample.
    pub fn sample_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }

    /// The `count` fields belonging to one sample seed.
    pub fn fields(&self, sample_seed: u64, count: usize) -> Result<Vec<SpectralField<T>>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
        let log_spread = self.amplitude_spread.ln().to_f64_lossy();
        (0..count)
            .map(|_| {
                let factor = if log_spread > 0.0 {
                    rng.random_range(-log_spread..=log_spread).exp()
                } else {
                    1.0
                };
                let amp = self.amplitude * T::lit(factor);
                random_with_rng(
                    &self.grid,
                    &mut rng,
                    self.band_limit,
                    self.spectrum_slope,
                    amp,
                    self.mean_free,
                )
            })
            .collect()
    }

    /// A single field for a sample seed.
    pub fn field(&self, sample_seed: u64) -> Result<SpectralField<T>> {
        Ok(self.fields(sample_seed, 1)?.remove(0))
    }

    /// A pair `(u, v)` for a sample seed, related according to the pair mode.
    pub fn pair(&self, sample_seed: u64) -> Result<(SpectralField<T>, SpectralField<T>)> {
        match self.pair_mode {
            PairMode::Independent => {
                let mut v = self.fields(sample_seed, 2)?;
                let b = v.pop().expect("two fields");
                let a = v.pop().expect("two fields");
                Ok((a, b))
            }
            PairMode::Perturbed {
                band_limit,
                relative_size,
            } => {
                let v = self.field(sample_seed)?;
                let mut rng = ChaCha8Rng::seed_from_u64(sample_seed ^ PERTURBATION_STREAM);
                let rms = (v.norm_h_sq() / self.grid.volume()).sqrt();
                let w = random_with_rng(
                    &self.grid,
                    &mut rng,
                    band_limit,
                    self.spectrum_slope,
                    rms * relative_size,
                    self.mean_free,
                )?;
                Ok((v.add(&w)?, v))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_fields() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 16).unwrap();
        let s = FieldSampler::new(&g, 3, 4).unwrap();
        let (a, b) = s.pair(s.sample_seed(5)).unwrap();
        let (c, d) = s.pair(8).unwrap();
        assert_eq!(a, c);
        assert_eq!(b, d);
        assert_ne!(a, b);
        assert!(a.is_divergence_free() && b.is_divergence_free());
    }

    #[test]
    fn rejects_wide_band() {
        let g = TorusGrid::<f64>::periodic_2pi(2, 16).unwrap();
        assert!(FieldSampler::new(&g, 0, 8).is_err());
    }
}
