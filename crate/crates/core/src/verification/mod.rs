//! Numerical certification of the operator inequalities, identities and
//! trajectory bounds over seeded random fields and solver runs.

mod filter;
mod gronwall;
mod monotonicity;
mod nonlinear;
mod report;
mod sampler;
mod trajectory;

pub use filter::{check_filter_props, filter_residuals, spectral_band};
pub use gronwall::{
    check_gronwall_synthetic, check_gronwall_synthetic_with_alpha, cumulative_trapezoid, gronwall_envelope,
    nonlinear_gronwall_envelope,
};
pub use monotonicity::{
    check_local_bound_2d, check_monotonicity_r3, check_monotonicity_r_gt_3, check_monotonicity_r_gt_3_with,
};
pub use nonlinear::{
    check_b_bounds, check_c_monotone, check_identity_3, check_interpolation, check_pointwise_monotone, check_trilinear,
    identity_3_forms, report_sobolev_ratios,
};
pub use report::{CheckReport, SampleRecord};
pub use sampler::{FieldSampler, PairMode};
pub use trajectory::{
    check_apriori_bound, check_continuous_dependence, check_regularity_bound, check_regularity_bound_with_theta,
    default_theta, TRAJECTORY_TOL,
};

use crate::scalar::Real;
use crate::spectral::PhysicalField;

/// Normalized slack allowed for inequalities that hold exactly on the grid.
pub const INEQUALITY_TOL: f64 = 1e-9;

/// ∫|v|^e|w|² by grid quadrature (|v|⁰ = 1).
pub(crate) fn weighted_sq<T: Real>(v: &PhysicalField<T>, w: &PhysicalField<T>, e: T) -> T {
    let vm = v.magnitude();
    let wm = w.magnitude();
    let values = vm.iter().zip(&wm).map(|(a, b)| {
        let weight = if e == T::zero() { T::one() } else { a.powf(e) };
        weight * *b * *b
    });
    PhysicalField::integrate(v.grid(), values)
}
