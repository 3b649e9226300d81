use std::fmt;

use crate::error::{CbfError, Result};
use crate::scalar::Real;

/// Physical parameters of the CBF system.
///
/// `beta = 0` is accepted so the Navier–Stokes limit can be run through the
/// same code path; the monotonicity constants are then infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CbfParams<T: Real> {
    /// Brinkman coefficient (effective viscosity).
    pub mu: T,
    /// Darcy coefficient.
    pub alpha: T,
    /// Forchheimer coefficient.
    pub beta: T,
    /// Absorption exponent.
    pub r: T,
}

/// Which monotonicity statement applies to a parameter set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// r > 3: G + ρI is monotone.
    Supercritical,
    /// r = 3 with 2βμ ≥ 1: G itself is globally monotone.
    CriticalMonotone,
    /// r = 3 with 2βμ < 1: no global statement.
    CriticalUncovered,
    /// 1 ≤ r < 3.
    Subcritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::Supercritical => "supercritical (r > 3)",
            Regime::CriticalMonotone => "critical (r = 3, 2βμ ≥ 1)",
            Regime::CriticalUncovered => "critical (r = 3, 2βμ < 1)",
            Regime::Subcritical => "subcritical (r < 3)",
        };
        f.write_str(s)
    }
}

/// The shift constant ρ together with the regime it was evaluated in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoConstant<T: Real> {
    pub value: T,
    pub regime: Regime,
}

/// Selects between the two printed expressions for ρ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RhoVariant {
    /// (r−3)/(2μ(r−1)) · (2/(βμ(r−1)))^{2/(r−3)}, the constant of the
    /// monotonicity theorem.
    #[default]
    Theorem,
    /// (r−3)/(r−1) · (2/(βμ(r−1)))^{2/(r−3)}, as printed in the existence
    /// proof. Equal to 2μ times the theorem constant.
    ExistenceProof,
}

impl<T: Real> CbfParams<T> {
    /// Validated constructor: μ > 0, α ≥ 0, β ≥ 0, r ≥ 1, all finite.
    pub fn new(mu: T, alpha: T, beta: T, r: T) -> Result<Self> {
        let p = Self { mu, alpha, beta, r };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Err(CbfError::InvalidParameter { name, reason });
        if !(self.mu.is_finite() && self.mu > T::zero()) {
            return bad("mu", format!("must be positive, got {}", self.mu));
        }
        if !(self.alpha.is_finite() && self.alpha >= T::zero()) {
            return bad("alpha", format!("must be non-negative, got {}", self.alpha));
        }
        if !(self.beta.is_finite() && self.beta >= T::zero()) {
            return bad("beta", format!("must be non-negative, got {}", self.beta));
        }
        if !(self.r.is_finite() && self.r >= T::one()) {
            return bad("r", format!("must be at least 1, got {}", self.r));
        }
        Ok(())
    }

    pub fn regime(&self) -> Regime {
        let three = T::lit(3.0);
        if self.r > three {
            Regime::Supercritical
        } else if self.r == three {
            if T::lit(2.0) * self.beta * self.mu >= T::one() {
                Regime::CriticalMonotone
            } else {
                Regime::CriticalUncovered
            }
        } else {
            Regime::Subcritical
        }
    }

    /// True for r = 3 with 2βμ ≥ 1.
    pub fn is_critical_monotone(&self) -> bool {
        self.regime() == Regime::CriticalMonotone
    }

    /// ρ of the monotonicity theorem. Zero (annotated with the regime) for
    /// r ≤ 3; infinite when β = 0 and r > 3.
    pub fn rho_constant(&self) -> RhoConstant<T> {
        self.rho_with(RhoVariant::Theorem)
    }

    pub fn rho_with(&self, variant: RhoVariant) -> RhoConstant<T> {
        let regime = self.regime();
        if regime != Regime::Supercritical {
            return RhoConstant {
                value: T::zero(),
                regime,
            };
        }
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let (mu, beta, r) = (self.mu, self.beta, self.r);
        let base = two / (beta * mu * (r - one));
        let power = base.powf(two / (r - three));
        let value = match variant {
            RhoVariant::Theorem => (r - three) / (two * mu * (r - one)) * power,
            RhoVariant::ExistenceProof => (r - three) / (r - one) * power,
        };
        RhoConstant { value, regime }
    }

    /// ρ* = 2(r−3)/(μ(r−1)) · (4/(βμ(r−1)))^{2/(r−3)} from the regularity
    /// estimate; only defined for r > 3.
    pub fn rho_star(&self) -> Result<T> {
        if self.r <= T::lit(3.0) {
            return Err(CbfError::NotApplicable(format!(
                "rho* requires r > 3, got r = {}",
                self.r
            )));
        }
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let (mu, beta, r) = (self.mu, self.beta, self.r);
        Ok(two * (r - three) / (mu * (r - one)) * (T::lit(4.0) / (beta * mu * (r - one))).powf(two / (r - three)))
    }
}

/// Free-function form of [`CbfParams::rho_constant`].
pub fn rho_constant<T: Real>(params: &CbfParams<T>) -> RhoConstant<T> {
    params.rho_constant()
}

/// Free-function form of [`CbfParams::rho_star`].
pub fn rho_star_constant<T: Real>(params: &CbfParams<T>) -> Result<T> {
    params.rho_star()
}
