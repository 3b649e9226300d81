//! Pseudo-spectral Fourier–Galerkin solver for the convective
//! Brinkman–Forchheimer (CBF) equations
//!
//! ```text
//! ∂ₜu − μΔu + (u·∇)u + αu + β|u|^{r−1}u + ∇p = f,   ∇·u = 0
//! ```
//!
//! on the periodic torus 𝕋^d = (ℝ/Lℤ)^d, d ∈ {2, 3}, together with a
//! verification harness that checks the operator identities, monotonicity
//! inequalities, energy balance and stability bounds the solver is expected
//! to satisfy.
//!
//! All numerical code is generic over a [`Real`] scalar (`f64` and `f32`
//! are provided). The aliases at the crate root fix the scalar to `f64`,
//! which is what the CLI and the verification tolerances assume.

pub mod convergence;
pub mod error;
pub mod operators;
pub mod scalar;
pub mod solver;
pub mod spectral;
pub mod verification;

pub use error::{CbfError, Result};
pub use operators::{CbfParams, Operators, Regime, RhoConstant, RhoVariant};
pub use scalar::Real;
pub use solver::{
    DiagnosticsSample, ForcingSpec, InitialCondition, RunOutput, Scheme, SimulationState, SolverConfig, Truncation,
};
pub use spectral::{PhysicalField, SpectralField, TorusGrid};
pub use verification::{CheckReport, FieldSampler};

/// Torus grid in double precision.
pub type Grid = TorusGrid<f64>;
/// Spectral vector field in double precision.
pub type Spectral = SpectralField<f64>;
/// Physical-space vector field in double precision.
pub type Physical = PhysicalField<f64>;
/// Physical parameters in double precision.
pub type Params = CbfParams<f64>;
/// Solver state in double precision.
pub type State = SimulationState<f64>;
/// Diagnostics row in double precision.
pub type Sample = DiagnosticsSample<f64>;
/// Forcing specification in double precision.
pub type Forcing = ForcingSpec<f64>;

/// Single-precision variants, mainly useful for throughput experiments.
pub mod f32_types {
    use super::*;

    pub type Grid = TorusGrid<f32>;
    pub type Spectral = SpectralField<f32>;
    pub type Physical = PhysicalField<f32>;
    pub type Params = CbfParams<f32>;
}
