use crate::error::{CbfError, Result};
use crate::scalar::Real;
use crate::spectral::{exp_filter, SpectralField};

use super::report::{CheckReport, Tally};
use super::sampler::FieldSampler;
use super::INEQUALITY_TOL;

/// Largest |k|² carried by a nonzero coefficient of `u`.
pub fn spectral_band<T: Real>(u: &SpectralField<T>) -> T {
    let grid = u.grid();
    let mut band = T::zero();
    for comp in u.coefficients() {
        for (flat, z) in comp.iter().enumerate() {
            if z.norm() > T::zero() {
                band = band.max(grid.k_sq(flat));
            }
        }
    }
    band
}

/// Filter residuals ‖(I − P_{1/n})u‖ for each n.
pub fn filter_residuals<T: Real>(u: &SpectralField<T>, n_values: &[T]) -> Result<Vec<T>> {
    n_values
        .iter()
        .map(|n| Ok(u.sub(&exp_filter(u, *n)?)?.norm_h()))
        .collect()
}

/// Properties of the eigenspace filter on one field: ‖P_{1/n}u‖ ≤ ‖u‖,
/// residuals strictly decreasing along increasing n, and
/// ‖(I − P_{1/n})u‖ ≤ (Λ/n)‖u‖ at the largest n, Λ the largest |k|² present.
fn filter_props_for_field<T: Real>(
    u: &SpectralField<T>,
    n_values: &[T],
    seed: u64,
    tallies: &mut [Tally; 3],
) -> Result<()> {
    if n_values.is_empty() || n_values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CbfError::InvalidArguments(
            "n_values must be non-empty and strictly increasing".into(),
        ));
    }
    let norm = u.norm_h();
    for n in n_values {
        let filtered = exp_filter(u, *n)?.norm_h();
        tallies[0].record(seed, (norm - filtered).to_f64_lossy(), norm.to_f64_lossy());
    }
    let residuals = filter_residuals(u, n_values)?;
    for w in residuals.windows(2) {
        let drop = w[0] - w[1];
        if w[0] > T::zero() && !(drop > T::zero()) {
            tallies[1].record(seed, -1.0, 1.0);
        } else {
            tallies[1].record(seed, drop.to_f64_lossy(), w[0].to_f64_lossy());
        }
    }
    let n_max = *n_values.last().expect("non-empty");
    let bound = spectral_band(u) / n_max * norm;
    let last = *residuals.last().expect("non-empty");
    tallies[2].record(seed, (bound - last).to_f64_lossy(), bound.to_f64_lossy());
    Ok(())
}

/// Filter properties over sampled fields.
pub fn check_filter_props<T: Real>(sampler: &FieldSampler<T>, n_values: &[T], n_samples: usize) -> Result<CheckReport> {
    let mut tallies = [
        Tally::new("non-expansive", INEQUALITY_TOL).keep_details(sampler.record_details),
        Tally::new("residual decreasing", INEQUALITY_TOL).keep_details(sampler.record_details),
        Tally::new("band-limit rate", INEQUALITY_TOL).keep_details(sampler.record_details),
    ];
    for i in 0..n_samples {
        let seed = sampler.sample_seed(i);
        filter_props_for_field(&sampler.field(seed)?, n_values, seed, &mut tallies)?;
    }
    Ok(CheckReport::combine(
        "filter_props",
        tallies.into_iter().map(Tally::finish).collect(),
    ))
}
