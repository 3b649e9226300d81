use std::fmt;
use std::str::FromStr;

use crate::error::{CbfError, Result};
use crate::scalar::Real;
use crate::spectral::TruncationShape;

/// Time integration scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scheme {
    /// Backward Euler on μA + α, forward Euler on B + βC.
    ImexEuler,
    /// Crank–Nicolson on μA + α, Adams–Bashforth 2 on B + βC.
    #[default]
    ImexCnab2,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::ImexEuler => "imex_euler",
            Scheme::ImexCnab2 => "imex_cnab2",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = CbfError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "imex_euler" => Ok(Scheme::ImexEuler),
            "imex_cnab2" | "cnab2" => Ok(Scheme::ImexCnab2),
            other => Err(CbfError::Configuration(format!(
                "unknown scheme {other:?} (expected imex_euler or imex_cnab2)"
            ))),
        }
    }
}

/// Extra Galerkin truncation applied after every update. `n = 0` keeps every
/// grid mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Truncation {
    pub n: usize,
    pub shape: TruncationShape,
}

impl Truncation {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn is_active(&self) -> bool {
        self.n > 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T: Real> {
    pub dt: T,
    pub t_end: T,
    pub scheme: Scheme,
    pub truncation: Truncation,
    pub dealias: bool,
    /// Emit a diagnostics sample every this many steps.
    pub diagnostics_every: usize,
    /// Keep a snapshot every this many steps; 0 disables snapshots.
    pub snapshot_every: usize,
    /// Internal substeps per step (each of size dt/substeps).
    pub substeps: usize,
    /// Track ‖Au‖², the weighted gradient and forcing integrals.
    pub extended_diagnostics: bool,
    /// Abort when ‖u‖_H exceeds this multiple of its initial value.
    pub blowup_factor: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            dt: T::lit(1e-3),
            t_end: T::one(),
            scheme: Scheme::ImexCnab2,
            truncation: Truncation::none(),
            dealias: true,
            diagnostics_every: 1,
            snapshot_every: 0,
            substeps: 1,
            extended_diagnostics: false,
            blowup_factor: T::lit(1e6),
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn new(dt: T, t_end: T, scheme: Scheme) -> Result<Self> {
        let c = Self {
            dt,
            t_end,
            scheme,
            ..Self::default()
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_extended_diagnostics(mut self, on: bool) -> Self {
        self.extended_diagnostics = on;
        self
    }

    pub fn with_diagnostics_every(mut self, every: usize) -> Self {
        self.diagnostics_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Err(CbfError::InvalidParameter { name, reason });
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            return bad("dt", format!("must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end >= T::zero()) {
            return bad("t_end", format!("must be non-negative, got {}", self.t_end));
        }
        if self.t_end > T::zero() && self.t_end < self.dt {
            return bad("t_end", format!("must be 0 or at least dt = {}", self.dt));
        }
        let ratio = self.t_end / self.dt;
        if (ratio - ratio.round()).abs() > T::lit(1e-6) * ratio.max(T::one()) {
            return bad("t_end", format!("must be a whole multiple of dt = {}", self.dt));
        }
        if self.diagnostics_every == 0 {
            return bad("diagnostics_every", "must be at least 1".into());
        }
        if self.substeps == 0 {
            return bad("substeps", "must be at least 1".into());
        }
        if !(self.blowup_factor > T::one()) {
            return bad("blowup_factor", format!("must exceed 1, got {}", self.blowup_factor));
        }
        Ok(())
    }

    /// Number of steps of size dt that reach t_end.
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round().to_usize().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_count_and_validation() {
        let c = SolverConfig::<f64>::new(1e-3, 1.0, Scheme::ImexCnab2).unwrap();
        assert_eq!(c.n_steps(), 1000);
        assert!(SolverConfig::<f64>::new(0.0, 1.0, Scheme::ImexEuler).is_err());
        assert!(SolverConfig::<f64>::new(0.3, 1.0, Scheme::ImexEuler).is_err());
        assert!(SolverConfig::<f64>::new(0.1, 0.05, Scheme::ImexEuler).is_err());
        assert_eq!(
            SolverConfig::<f64>::new(0.1, 0.0, Scheme::ImexEuler).unwrap().n_steps(),
            0
        );
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [Scheme::ImexEuler, Scheme::ImexCnab2] {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("rk4".parse::<Scheme>().is_err());
    }
}
