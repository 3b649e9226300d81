use num_complex::Complex;

use crate::error::{CbfError, Result};
use crate::scalar::Real;
use crate::spectral::grid::{TorusGrid, MAX_DIM};

/// Real samples of a field on the grid, one array per component.
///
/// Vector fields carry `grid.dim()` components; scalar fields (pressure,
/// divergence) carry one.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField<T: Real> {
    grid: TorusGrid<T>,
    components: Vec<Vec<T>>,
}

/// Fourier coefficients û(k) of a real field, one array per component.
///
/// With the convention `u(x) = Σ_k û(k) e^{ik·x}` the coefficients satisfy
/// û(−k) = conj(û(k)). The `divergence_free` flag certifies that every mode
/// satisfies k·û(k) = 0 to roundoff.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<T: Real> {
    grid: TorusGrid<T>,
    coefficients: Vec<Vec<Complex<T>>>,
    divergence_free: bool,
}

#[inline]
pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> PhysicalField<T> {
    pub fn new(grid: TorusGrid<T>, components: Vec<Vec<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(CbfError::InvalidField("field has no components".into()));
        }
        for (c, comp) in components.iter().enumerate() {
            if comp.len() != grid.len() {
                return Err(CbfError::InvalidField(format!(
                    "component {c} has {} samples, grid has {}",
                    comp.len(),
                    grid.len()
                )));
            }
            if let Some(i) = comp.iter().position(|v| !v.is_finite()) {
                return Err(CbfError::InvalidField(format!(
                    "non-finite sample in component {c} at index {i}"
                )));
            }
        }
        Ok(Self { grid, components })
    }

    /// Vector field of zeros.
    pub fn zeros(grid: &TorusGrid<T>) -> Self {
        Self::zeros_with(grid, grid.dim())
    }

    pub fn zeros_with(grid: &TorusGrid<T>, n_components: usize) -> Self {
        Self {
            grid: grid.clone(),
            components: vec![vec![T::zero(); grid.len()]; n_components],
        }
    }

    /// Samples a vector-valued function at the grid points.
    pub fn from_fn(grid: &TorusGrid<T>, f: impl Fn(&[T]) -> Vec<T>) -> Result<Self> {
        let dim = grid.dim();
        let mut components = vec![Vec::with_capacity(grid.len()); dim];
        for flat in 0..grid.len() {
            let x = grid.point(flat);
            let v = f(&x[..dim]);
            if v.len() != dim {
                return Err(CbfError::InvalidField(format!(
                    "sampling function returned {} components, expected {dim}",
                    v.len()
                )));
            }
            for (c, value) in v.into_iter().enumerate() {
                components[c].push(value);
            }
        }
        Self::new(grid.clone(), components)
    }

    /// Samples a scalar function at the grid points.
    pub fn scalar_from_fn(grid: &TorusGrid<T>, f: impl Fn(&[T]) -> T) -> Result<Self> {
        let dim = grid.dim();
        let values = (0..grid.len()).map(|flat| f(&grid.point(flat)[..dim])).collect();
        Self::new(grid.clone(), vec![values])
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize) -> &[T] {
        &self.components[c]
    }

    pub fn components(&self) -> &[Vec<T>] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Vec<T>> {
        self.components
    }

    /// Vector value at a flat grid index.
    #[inline]
    pub fn at(&self, flat: usize) -> [T; MAX_DIM] {
        let mut v = [T::zero(); MAX_DIM];
        for (c, comp) in self.components.iter().enumerate().take(MAX_DIM) {
            v[c] = comp[flat];
        }
        v
    }

    /// Euclidean magnitude |u(x)| at every grid point.
    pub fn magnitude(&self) -> Vec<T> {
        (0..self.grid.len())
            .map(|i| self.components.iter().map(|c| c[i] * c[i]).sum::<T>().sqrt())
            .collect()
    }

    /// Grid quadrature ∫ g(x) dx of a per-point scalar.
    pub fn integrate(grid: &TorusGrid<T>, values: impl Iterator<Item = T>) -> T {
        values.sum::<T>() * grid.cell_volume()
    }

    /// Pointwise map over the vector value at each point.
    pub fn map_vectors(&self, f: impl Fn(&[T]) -> Vec<T>) -> Result<Self> {
        let nc = self.n_components();
        let mut out = vec![Vec::with_capacity(self.grid.len()); nc];
        for flat in 0..self.grid.len() {
            let v = self.at(flat);
            for (c, value) in f(&v[..nc]).into_iter().enumerate() {
                out[c].push(value);
            }
        }
        Self::new(self.grid.clone(), out)
    }

    /// Largest absolute difference against another field.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_compatible(other)?;
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (*x - *y).abs()))
            .fold(T::zero(), T::max))
    }

    /// Largest absolute sample.
    pub fn max_abs(&self) -> T {
        self.components.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.n_components() != other.n_components() {
            return Err(CbfError::IncompatibleGrids);
        }
        Ok(())
    }
}

impl<T: Real> SpectralField<T> {
    /// Builds a field from raw coefficients. The divergence-free flag starts
    /// cleared; use [`SpectralField::certify_divergence_free`] or a Leray
    /// projection to set it.
    pub fn new(grid: TorusGrid<T>, coefficients: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(CbfError::InvalidField("field has no components".into()));
        }
        for (c, comp) in coefficients.iter().enumerate() {
            if comp.len() != grid.len() {
                return Err(CbfError::InvalidField(format!(
                    "component {c} has {} coefficients, grid has {}",
                    comp.len(),
                    grid.len()
                )));
            }
            if comp.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(CbfError::InvalidField(format!(
                    "non-finite coefficient in component {c}"
                )));
            }
        }
        Ok(Self {
            grid,
            coefficients,
            divergence_free: false,
        })
    }

    pub(crate) fn from_parts(grid: TorusGrid<T>, coefficients: Vec<Vec<Complex<T>>>, divergence_free: bool) -> Self {
        Self {
            grid,
            coefficients,
            divergence_free,
        }
    }

    pub fn zeros(grid: &TorusGrid<T>) -> Self {
        Self::from_parts(grid.clone(), vec![vec![czero(); grid.len()]; grid.dim()], true)
    }

    pub fn zeros_scalar(grid: &TorusGrid<T>) -> Self {
        Self::from_parts(grid.clone(), vec![vec![czero(); grid.len()]], false)
    }

    /// A real single-mode vector field `a e^{ik·x} + conj(a) e^{−ik·x}` for
    /// the integer mode `m` and complex amplitude vector `a`.
    pub fn single_mode(grid: &TorusGrid<T>, m: &[i64], amplitude: &[Complex<T>]) -> Result<Self> {
        let dim = grid.dim();
        if m.len() != dim || amplitude.len() != dim {
            return Err(CbfError::InvalidArguments(format!(
                "mode and amplitude must have {dim} entries"
            )));
        }
        let half = (grid.n_points() / 2) as i64;
        if m.iter().any(|&mi| mi.abs() >= half) {
            return Err(CbfError::InvalidArguments(format!(
                "mode {m:?} is not strictly inside the grid band (|m_i| < {half})"
            )));
        }
        let mut out = Self::zeros(grid);
        out.divergence_free = false;
        let idx = grid.index_of_mode(m);
        let neg = grid.conjugate_index(idx);
        for c in 0..dim {
            if idx == neg {
                out.coefficients[c][idx] = Complex::new(amplitude[c].re, T::zero());
            } else {
                out.coefficients[c][idx] = amplitude[c];
                out.coefficients[c][neg] = amplitude[c].conj();
            }
        }
        Ok(out)
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn n_components(&self) -> usize {
        self.coefficients.len()
    }

    pub fn component(&self, c: usize) -> &[Complex<T>] {
        &self.coefficients[c]
    }

    pub fn coefficients(&self) -> &[Vec<Complex<T>>] {
        &self.coefficients
    }

    /// Mutable access clears the divergence-free certificate.
    pub fn coefficients_mut(&mut self) -> &mut [Vec<Complex<T>>] {
        self.divergence_free = false;
        &mut self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<Vec<Complex<T>>> {
        self.coefficients
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    pub(crate) fn set_divergence_free(&mut self, flag: bool) {
        self.divergence_free = flag;
    }

    /// Largest |û| over all components and modes.
    pub fn max_abs_coefficient(&self) -> T {
        self.coefficients
            .iter()
            .flatten()
            .fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// √(Σ_k |û(k)|²), the coefficient ℓ² norm.
    pub fn coefficient_l2(&self) -> T {
        self.coefficients
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// max_k |k·û(k)| with the differentiation wavevector (Nyquist
    /// component zero).
    pub fn max_divergence(&self) -> T {
        let dim = self.grid.dim();
        let mut worst = T::zero();
        for flat in 0..self.grid.len() {
            let k = self.grid.derivative_wavevector(flat);
            let mut s = czero::<T>();
            for a in 0..dim.min(self.n_components()) {
                s = s + self.coefficients[a][flat] * k[a];
            }
            worst = worst.max(s.norm());
        }
        worst
    }

    /// Sets the divergence-free certificate after checking
    /// max|k·û(k)| ≤ 10⁻¹²·‖û‖ (scaled by the precision of `T`).
    pub fn certify_divergence_free(mut self) -> Result<Self> {
        self.require_vector()?;
        let defect = self.max_divergence();
        let allowed = divergence_tolerance::<T>() * self.coefficient_l2() * self.grid.k0().max(T::one());
        if defect > allowed {
            return Err(CbfError::ContractViolation(format!(
                "field is not divergence-free: max|k·û| = {defect:e} > {allowed:e}"
            )));
        }
        self.divergence_free = true;
        Ok(self)
    }

    /// Largest Hermitian defect max_k |û(−k) − conj(û(k))|.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for comp in &self.coefficients {
            for (flat, z) in comp.iter().enumerate() {
                let w = comp[self.grid.conjugate_index(flat)];
                worst = worst.max((w - z.conj()).norm());
            }
        }
        worst
    }

    /// Replaces every coefficient by the Hermitian average
    /// (û(k) + conj(û(−k)))/2.
    pub fn symmetrize(&mut self) {
        let grid = self.grid.clone();
        let half = T::lit(0.5);
        for comp in &mut self.coefficients {
            let snapshot = comp.clone();
            for (flat, z) in comp.iter_mut().enumerate() {
                *z = (snapshot[flat] + snapshot[grid.conjugate_index(flat)].conj()) * half;
            }
        }
    }

    pub(crate) fn check_hermitian(&self) -> Result<()> {
        let defect = self.hermitian_defect();
        let allowed = T::structural_tol() * self.max_abs_coefficient().max(T::min_positive_value());
        if defect > allowed {
            return Err(CbfError::SymmetryViolation {
                defect: defect.to_f64_lossy(),
                allowed: allowed.to_f64_lossy(),
            });
        }
        Ok(())
    }

    pub(crate) fn require_vector(&self) -> Result<()> {
        if self.n_components() != self.grid.dim() {
            return Err(CbfError::InvalidField(format!(
                "expected a vector field with {} components, got {}",
                self.grid.dim(),
                self.n_components()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.n_components() != other.n_components() {
            return Err(CbfError::IncompatibleGrids);
        }
        Ok(())
    }

    /// Coefficient-wise map keeping the component structure.
    pub(crate) fn map_modes(&self, divergence_free: bool, f: impl Fn(usize, usize, Complex<T>) -> Complex<T>) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(c, comp)| comp.iter().enumerate().map(|(flat, z)| f(c, flat, *z)).collect())
            .collect();
        Self::from_parts(self.grid.clone(), coefficients, divergence_free)
    }

    /// a·self + b·other.
    pub fn lin_comb(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.check_compatible(other)?;
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| *p * a + *q * b).collect())
            .collect();
        Ok(Self::from_parts(
            self.grid.clone(),
            coefficients,
            self.divergence_free && other.divergence_free,
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lin_comb(T::one(), other, T::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(T::one(), other, -T::one())
    }

    pub fn scale(&self, s: T) -> Self {
        self.map_modes(self.divergence_free, |_, _, z| z * s)
    }

    /// Accumulates `s·other` into `self`.
    pub fn axpy(&mut self, s: T, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        for (x, y) in self.coefficients.iter_mut().zip(&other.coefficients) {
            for (p, q) in x.iter_mut().zip(y) {
                *p = *p + *q * s;
            }
        }
        self.divergence_free = self.divergence_free && other.divergence_free;
        Ok(())
    }

    /// Coefficient of component `c` at integer mode `m`.
    pub fn mode(&self, c: usize, m: &[i64]) -> Complex<T> {
        self.coefficients[c][self.grid.index_of_mode(m)]
    }
}

/// Tolerance factor for the divergence-free certificate: 10⁻¹² in double
/// precision, scaled with machine epsilon otherwise.
pub fn divergence_tolerance<T: Real>() -> T {
    T::epsilon() * T::lit(4.5e3)
}
