use crate::error::Result;
use crate::operators::CbfParams;
use crate::scalar::Real;
use crate::spectral::{
    a_norm_sq, duality_pairing, lp_integral_physical, norm_v_dual_sq, to_physical, PhysicalField, SpectralField,
};

/// Norms and pairings of the solution at one instant.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quantities<T: Real> {
    /// ‖u‖_H².
    pub energy: T,
    /// ‖∇u‖_H².
    pub v_seminorm_sq: T,
    /// ‖u‖_H² + ‖∇u‖_H².
    pub v_norm_sq: T,
    /// ∫|u|^{r+1}.
    pub lr1: T,
    /// ⟨f, u⟩.
    pub forcing_power: T,
    /// ‖f‖_H².
    pub forcing_h_sq: T,
    /// ‖f‖_{V′}².
    pub forcing_vdual_sq: T,
    /// max_x |u(x)|.
    pub max_speed: T,
    /// ‖Au‖_H² (extended diagnostics only).
    pub a_norm_sq: T,
    /// ∫|u|^{r−1}|∇u|² (extended diagnostics only).
    pub weighted_grad: T,
}

impl<T: Real> Quantities<T> {
    pub fn evaluate(u: &SpectralField<T>, f: &SpectralField<T>, params: &CbfParams<T>, extended: bool) -> Result<Self> {
        let up = to_physical(u)?;
        let energy = u.norm_h_sq();
        let v_seminorm_sq = crate::spectral::seminorm_grad_sq(u);
        let mut q = Self {
            energy,
            v_seminorm_sq,
            v_norm_sq: energy + v_seminorm_sq,
            lr1: lp_integral_physical(&up, params.r + T::one())?,
            forcing_power: duality_pairing(f, u)?,
            forcing_h_sq: f.norm_h_sq(),
            forcing_vdual_sq: norm_v_dual_sq(f),
            max_speed: up.magnitude().into_iter().fold(T::zero(), T::max),
            a_norm_sq: T::zero(),
            weighted_grad: T::zero(),
        };
        if extended {
            q.a_norm_sq = a_norm_sq(u);
            q.weighted_grad = weighted_gradient_integral(u, &up, params.r)?;
        }
        Ok(q)
    }
}

/// ∫|u|^{r−1}|∇u|² by grid quadrature.
pub fn weighted_gradient_integral<T: Real>(u: &SpectralField<T>, up: &PhysicalField<T>, r: T) -> Result<T> {
    let grad: Vec<PhysicalField<T>> = u.gradient().iter().map(to_physical).collect::<Result<_>>()?;
    let mag = up.magnitude();
    let exponent = r - T::one();
    let values = (0..u.grid().len()).map(|flat| {
        let g2: T = grad
            .iter()
            .map(|dj| dj.components().iter().map(|c| c[flat] * c[flat]).sum::<T>())
            .sum();
        let w = if exponent == T::zero() {
            T::one()
        } else {
            mag[flat].powf(exponent)
        };
        w * g2
    });
    Ok(PhysicalField::integrate(u.grid(), values))
}

/// Time integrals accumulated with the trapezoidal rule.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Integrals<T: Real> {
    /// ∫‖∇u‖².
    pub dissipation: T,
    /// ∫∫|u|^{r+1}.
    pub damping: T,
    /// ∫⟨f, u⟩.
    pub forcing: T,
    /// ∫α‖u‖².
    pub darcy: T,
    /// ∫‖Au‖².
    pub a_norm: T,
    /// ∫∫|u|^{r−1}|∇u|².
    pub weighted_grad: T,
    /// ∫‖f‖_H².
    pub forcing_h: T,
    /// ∫‖f‖_{V′}².
    pub forcing_vdual: T,
}

impl<T: Real> Integrals<T> {
    pub(crate) fn accumulate(&mut self, h: T, a: &Quantities<T>, b: &Quantities<T>, alpha: T) {
        let w = h * T::lit(0.5);
        self.dissipation = self.dissipation + w * (a.v_seminorm_sq + b.v_seminorm_sq);
        self.damping = self.damping + w * (a.lr1 + b.lr1);
        self.forcing = self.forcing + w * (a.forcing_power + b.forcing_power);
        self.darcy = self.darcy + w * alpha * (a.energy + b.energy);
        self.a_norm = self.a_norm + w * (a.a_norm_sq + b.a_norm_sq);
        self.weighted_grad = self.weighted_grad + w * (a.weighted_grad + b.weighted_grad);
        self.forcing_h = self.forcing_h + w * (a.forcing_h_sq + b.forcing_h_sq);
        self.forcing_vdual = self.forcing_vdual + w * (a.forcing_vdual_sq + b.forcing_vdual_sq);
    }
}

/// Solver state: the Galerkin unknown, the previous nonlinear term for the
/// multistep scheme, and the accumulated integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationState<T: Real> {
    /// Current time.
    pub t: T,
    /// Time at which this run (or restart) began.
    pub t_start: T,
    /// Substeps taken since `t_start`.
    pub substeps_taken: u64,
    pub u: SpectralField<T>,
    /// B(u) + βC(u) at the previous substep.
    pub prev_nonlinear: Option<SpectralField<T>>,
    pub integrals: Integrals<T>,
    /// Quantities at `t`.
    pub current: Quantities<T>,
    /// ‖u‖_H² at `t_start`.
    pub initial_energy: T,
}

impl<T: Real> SimulationState<T> {
    /// E(t) − E(t₀) + 2(μ∫‖∇u‖² + ∫α‖u‖² + β∫‖u‖_{r+1}^{r+1} − ∫⟨f,u⟩).
    pub fn cumulative_energy_residual(&self, params: &CbfParams<T>) -> T {
        let two = T::lit(2.0);
        let i = &self.integrals;
        self.current.energy - self.initial_energy
            + two * (params.mu * i.dissipation + i.darcy + params.beta * i.damping - i.forcing)
    }
}
