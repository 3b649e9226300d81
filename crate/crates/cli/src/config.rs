use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use cbf_core::solver::{AnalyticForcing, InitialCondition, Scheme, SolverConfig, Truncation};
use cbf_core::spectral::TruncationShape;
use cbf_core::{Forcing, Grid, Params, SpectralField};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub params: ParamsSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub ic: IcSection,
    #[serde(default)]
    pub forcing: ForcingSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub convergence: ConvergenceSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_length")]
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub mu: f64,
    #[serde(default)]
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: String,
    pub dealias: bool,
    /// Extra Galerkin truncation; 0 keeps every grid mode.
    pub truncation: usize,
    pub truncation_shape: String,
    pub substeps: usize,
    pub blowup_factor: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            scheme: Scheme::ImexCnab2.name().to_string(),
            dealias: true,
            truncation: 0,
            truncation_shape: "box".to_string(),
            substeps: 1,
            blowup_factor: 1e6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IcSection {
    /// zero, taylor_green, random, single_mode or snapshot.
    pub family: String,
    pub amplitude: f64,
    pub seed: u64,
    pub band_limit: usize,
    pub slope: f64,
    pub mean_free: bool,
    pub mode: Vec<i64>,
    pub path: Option<PathBuf>,
}

impl Default for IcSection {
    fn default() -> Self {
        Self {
            family: "taylor_green".to_string(),
            amplitude: 1.0,
            seed: 0,
            band_limit: 8,
            slope: 2.0,
            mean_free: true,
            mode: Vec::new(),
            path: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForcingSection {
    /// zero, kolmogorov, taylor_green, oscillating or snapshot.
    pub kind: String,
    pub amplitude: f64,
    pub wavenumber: u32,
    pub omega: f64,
    pub path: Option<PathBuf>,
}

impl Default for ForcingSection {
    fn default() -> Self {
        Self {
            kind: "zero".to_string(),
            amplitude: 1.0,
            wavenumber: 1,
            omega: 1.0,
            path: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub diagnostics_every: usize,
    /// Steps between snapshots; 0 writes only the final state.
    pub snapshot_every: usize,
    pub extended_diagnostics: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("cbf-output"),
            diagnostics_every: 1,
            snapshot_every: 0,
            extended_diagnostics: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    /// Empty selects every check applicable to the parameters.
    pub checks: Vec<String>,
    pub seed: u64,
    pub samples: usize,
    /// Grid size for sampled fields.
    pub n: usize,
    pub band_limit: usize,
    pub slope: f64,
    pub interpolation: [f64; 3],
    pub filter_n: Vec<f64>,
    pub perturbation: f64,
    pub theta: Option<f64>,
    /// Per-check tolerance overrides.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            checks: Vec::new(),
            seed: 42,
            samples: 100,
            n: 32,
            band_limit: 8,
            slope: 2.0,
            interpolation: [2.0, 4.0, 6.0],
            filter_n: vec![1.0, 10.0, 100.0, 1000.0, 10000.0],
            perturbation: 1e-3,
            theta: None,
            tolerances: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceSection {
    pub dt: Vec<f64>,
    pub n: Vec<usize>,
    /// error, richardson or energy_residual.
    pub metric: String,
    pub min_order: Option<f64>,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        Self {
            dt: Vec::new(),
            n: Vec::new(),
            metric: "richardson".to_string(),
            min_order: None,
        }
    }
}

fn default_dim() -> usize {
    2
}

fn default_n() -> usize {
    64
}

fn default_length() -> f64 {
    std::f64::consts::TAU
}

fn invalid(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {reason}"))
}

fn resolve(base: &Path, path: &mut Option<PathBuf>, key: &str) -> Result<(), CliError> {
    if let Some(p) = path {
        if p.is_relative() {
            *p = base.join(&*p);
        }
        if !p.exists() {
            return Err(invalid(key, format!("{} does not exist", p.display())));
        }
    }
    Ok(())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        resolve(base, &mut cfg.ic.path, "ic.path")?;
        resolve(base, &mut cfg.forcing.path, "forcing.path")?;
        Ok(cfg)
    }

    /// Parses and validates without touching the file system.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.grid;
        if !(2..=3).contains(&g.dim) {
            return Err(invalid("grid.dim", format!("must be 2 or 3, got {}", g.dim)));
        }
        if g.n < 4 || g.n % 2 != 0 {
            return Err(invalid("grid.n", format!("must be even and at least 4, got {}", g.n)));
        }
        if !(g.length.is_finite() && g.length > 0.0) {
            return Err(invalid("grid.length", format!("must be positive, got {}", g.length)));
        }
        let p = &self.params;
        if !(p.mu.is_finite() && p.mu > 0.0) {
            return Err(invalid("params.mu", format!("must be positive, got {}", p.mu)));
        }
        if !(p.alpha.is_finite() && p.alpha >= 0.0) {
            return Err(invalid(
                "params.alpha",
                format!("must be non-negative, got {}", p.alpha),
            ));
        }
        if !(p.beta.is_finite() && p.beta >= 0.0) {
            return Err(invalid("params.beta", format!("must be non-negative, got {}", p.beta)));
        }
        if !(p.r.is_finite() && p.r >= 1.0) {
            return Err(invalid("params.r", format!("must be at least 1, got {}", p.r)));
        }
        self.solver_config()?;
        match self.ic.family.as_str() {
            "zero" | "taylor_green" => {}
            "random" => {
                if self.ic.band_limit == 0 || self.ic.band_limit >= g.n / 2 {
                    return Err(invalid("ic.band_limit", format!("must be in 1..{}", g.n / 2)));
                }
            }
            "single_mode" => {
                if self.ic.mode.len() != g.dim || self.ic.mode.iter().all(|m| *m == 0) {
                    return Err(invalid(
                        "ic.mode",
                        format!("needs a nonzero mode with {} entries", g.dim),
                    ));
                }
            }
            "snapshot" => {
                if self.ic.path.is_none() {
                    return Err(invalid("ic.path", "required for the snapshot family"));
                }
            }
            other => return Err(invalid("ic.family", format!("unknown family {other:?}"))),
        }
        match self.forcing.kind.as_str() {
            "zero" | "kolmogorov" | "oscillating" => {}
            "taylor_green" if g.dim == 2 => {}
            "taylor_green" => return Err(invalid("forcing.kind", "taylor_green forcing is 2-D only")),
            "snapshot" => {
                if self.forcing.path.is_none() {
                    return Err(invalid("forcing.path", "required for snapshot forcing"));
                }
            }
            other => return Err(invalid("forcing.kind", format!("unknown kind {other:?}"))),
        }
        if self.output.diagnostics_every == 0 {
            return Err(invalid("output.diagnostics_every", "must be positive"));
        }
        let v = &self.verify;
        if v.n < 4 || v.n % 2 != 0 {
            return Err(invalid("verify.n", format!("must be even and at least 4, got {}", v.n)));
        }
        if v.band_limit == 0 || v.band_limit >= v.n / 2 {
            return Err(invalid("verify.band_limit", format!("must be in 1..{}", v.n / 2)));
        }
        if v.samples == 0 {
            return Err(invalid("verify.samples", "must be positive"));
        }
        for name in &v.checks {
            if !crate::verify::CHECKS.contains(&name.as_str()) {
                return Err(invalid("verify.checks", format!("unknown check {name:?}")));
            }
        }
        for (name, tol) in &v.tolerances {
            if !crate::verify::CHECKS.contains(&name.as_str()) {
                return Err(invalid("verify.tolerances", format!("unknown check {name:?}")));
            }
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(invalid("verify.tolerances", format!("{name} must be non-negative")));
            }
        }
        if !(v.perturbation.is_finite() && v.perturbation > 0.0) {
            return Err(invalid("verify.perturbation", "must be positive"));
        }
        if !["error", "richardson", "energy_residual"].contains(&self.convergence.metric.as_str()) {
            return Err(invalid(
                "convergence.metric",
                format!("unknown metric {:?}", self.convergence.metric),
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Ok(Grid::new(self.grid.dim, self.grid.n, self.grid.length)?)
    }

    pub fn params(&self) -> Result<Params, CliError> {
        let p = &self.params;
        Ok(Params::new(p.mu, p.alpha, p.beta, p.r)?)
    }

    pub fn solver_config(&self) -> Result<SolverConfig<f64>, CliError> {
        let s = &self.solver;
        let scheme: Scheme = s.scheme.parse().map_err(|e| invalid("solver.scheme", e))?;
        let shape = match s.truncation_shape.as_str() {
            "box" => TruncationShape::Box,
            "ball" => TruncationShape::Ball,
            other => {
                return Err(invalid(
                    "solver.truncation_shape",
                    format!("expected box or ball, got {other:?}"),
                ))
            }
        };
        let config = SolverConfig {
            dt: s.dt,
            t_end: s.t_end,
            scheme,
            truncation: Truncation { n: s.truncation, shape },
            dealias: s.dealias,
            diagnostics_every: self.output.diagnostics_every.max(1),
            snapshot_every: self.output.snapshot_every,
            substeps: s.substeps,
            extended_diagnostics: self.output.extended_diagnostics,
            blowup_factor: s.blowup_factor,
        };
        config.validate().map_err(|e| match e {
            cbf_core::CbfError::InvalidParameter { name, reason } => invalid(&format!("solver.{name}"), reason),
            other => CliError::Config(other.to_string()),
        })?;
        Ok(config)
    }

    pub fn initial_condition(&self) -> Result<InitialCondition<f64>, CliError> {
        let ic = &self.ic;
        Ok(match ic.family.as_str() {
            "zero" => InitialCondition::Zero,
            "taylor_green" => InitialCondition::TaylorGreen {
                amplitude: ic.amplitude,
            },
            "random" => InitialCondition::RandomBandLimited {
                seed: ic.seed,
                band_limit: ic.band_limit,
                slope: ic.slope,
                amplitude: ic.amplitude,
                mean_free: ic.mean_free,
            },
            "single_mode" => InitialCondition::SingleMode {
                mode: ic.mode.clone(),
                amplitude: ic.amplitude,
            },
            "snapshot" => InitialCondition::Snapshot(ic.path.clone().expect("validated")),
            other => return Err(invalid("ic.family", format!("unknown family {other:?}"))),
        })
    }

    pub fn initial_field(&self, grid: &Grid) -> Result<SpectralField<f64>, CliError> {
        Ok(self.initial_condition()?.build(grid)?)
    }

    pub fn forcing(&self, grid: &Grid) -> Result<Forcing, CliError> {
        let f = &self.forcing;
        Ok(match f.kind.as_str() {
            "zero" => Forcing::Zero,
            "kolmogorov" => Forcing::Analytic(AnalyticForcing::Kolmogorov {
                amplitude: f.amplitude,
                wavenumber: f.wavenumber,
            }),
            "taylor_green" => Forcing::Analytic(AnalyticForcing::TaylorGreen { amplitude: f.amplitude }),
            "oscillating" => Forcing::Analytic(AnalyticForcing::Oscillating {
                amplitude: f.amplitude,
                wavenumber: f.wavenumber,
                omega: f.omega,
            }),
            "snapshot" => {
                let path = f.path.as_ref().expect("validated");
                let (_, field) = cbf_core::spectral::snapshot::read_snapshot::<f64>(path)?;
                if field.grid() != grid {
                    return Err(invalid("forcing.path", "snapshot was written on a different grid"));
                }
                Forcing::Steady(field)
            }
            other => return Err(invalid("forcing.kind", format!("unknown kind {other:?}"))),
        })
    }

    /// The built-in Taylor–Green configuration.
    pub fn taylor_green() -> Self {
        Self {
            grid: GridSection {
                dim: 2,
                n: 64,
                length: default_length(),
            },
            params: ParamsSection {
                mu: 0.1,
                alpha: 0.0,
                beta: 0.0,
                r: 3.0,
            },
            solver: SolverSection::default(),
            ic: IcSection::default(),
            forcing: ForcingSection::default(),
            output: OutputSection {
                diagnostics_every: 10,
                ..OutputSection::default()
            },
            verify: VerifySection::default(),
            convergence: ConvergenceSection::default(),
        }
    }
}
