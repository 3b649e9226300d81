//! Field representation on the periodic torus: grids, transforms,
//! spectral calculus, projections, filters and norms.

mod calculus;
mod field;
mod grid;
mod norms;
mod projection;
pub mod snapshot;
mod transform;

pub use calculus::{curl_2d, divergence, gradient, laplacian, scalar_gradient};
pub use field::{divergence_tolerance, PhysicalField, SpectralField};
pub use grid::{TorusGrid, MAX_DIM};
pub use norms::{
    a_norm_sq, duality_pairing, lp_integral, lp_integral_physical, norm_h, norm_h_sq, norm_lp, norm_lp_physical,
    norm_v, norm_v_dual, norm_v_dual_sq, norm_v_sq, physical_pairing, seminorm_grad, seminorm_grad_sq,
};
pub use projection::{dealias, exp_filter, galerkin_truncate, leray_project, truncate_with, TruncationShape};
pub use transform::{to_physical, to_spectral};

pub(crate) use field::czero;
