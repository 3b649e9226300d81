use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{CbfError, Result};
use crate::scalar::Real;

/// Maximum supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// Periodic computational domain 𝕋^d = (ℝ/Lℤ)^d sampled on `n` points per
/// axis.
///
/// Flat indices are row-major with axis 0 slowest. Along each axis index `j`
/// corresponds to the integer mode `j` for `j ≤ n/2` and `j − n` otherwise,
/// so the wavenumber set is `{−n/2+1, …, n/2}·2π/L`.
///
/// Per-mode tables (wavenumber vectors, |k|², conjugate partner) are built
/// once and shared between clones.
#[derive(Clone)]
pub struct TorusGrid<T: Real> {
    dim: usize,
    n: usize,
    period: T,
    tables: Arc<Tables<T>>,
}

struct Tables<T: Real> {
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    /// Integer modes per axis for every flat index.
    modes: Vec<[i64; MAX_DIM]>,
    /// Wavenumber vector k.
    k: Vec<[T; MAX_DIM]>,
    /// Derivative wavenumber: like `k` but zero on the unmatched Nyquist
    /// component so that `ik·û` stays Hermitian.
    kd: Vec<[T; MAX_DIM]>,
    k_sq: Vec<T>,
    neg: Vec<usize>,
}

impl<T: Real> TorusGrid<T> {
    pub fn new(dim: usize, n: usize, period: T) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(CbfError::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        if n < 8 || n % 2 != 0 {
            return Err(CbfError::InvalidGrid(format!(
                "n_points must be even and >= 8, got {n}"
            )));
        }
        if !(period.is_finite() && period > T::zero()) {
            return Err(CbfError::InvalidGrid(format!("period must be positive, got {period}")));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);

        let len = n.pow(dim as u32);
        let scale = T::lit(2.0) * T::PI() / period;
        let mut modes = Vec::with_capacity(len);
        let mut k = Vec::with_capacity(len);
        let mut kd = Vec::with_capacity(len);
        let mut k_sq = Vec::with_capacity(len);
        let mut neg = Vec::with_capacity(len);
        for flat in 0..len {
            let idx = unflatten(flat, dim, n);
            let mut m = [0i64; MAX_DIM];
            let mut kv = [T::zero(); MAX_DIM];
            let mut kdv = [T::zero(); MAX_DIM];
            let mut ksq = T::zero();
            let mut neg_idx = [0usize; MAX_DIM];
            for a in 0..dim {
                let j = idx[a];
                m[a] = mode_of(j, n);
                kv[a] = T::lit(m[a] as f64) * scale;
                kdv[a] = if j == n / 2 { T::zero() } else { kv[a] };
                ksq = ksq + kv[a] * kv[a];
                neg_idx[a] = (n - j) % n;
            }
            modes.push(m);
            k.push(kv);
            kd.push(kdv);
            k_sq.push(ksq);
            neg.push(flatten(&neg_idx, dim, n));
        }
        Ok(Self {
            dim,
            n,
            period,
            tables: Arc::new(Tables {
                forward,
                inverse,
                modes,
                k,
                kd,
                k_sq,
                neg,
            }),
        })
    }

    /// The default desk-scale grid: L = 2π.
    pub fn periodic_2pi(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, n, T::lit(2.0) * T::PI())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn period(&self) -> T {
        self.period
    }

    /// Total number of grid points, `n^dim`.
    #[inline]
    pub fn len(&self) -> usize {
        self.tables.k_sq.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Domain volume L^d.
    pub fn volume(&self) -> T {
        self.period.powi(self.dim as i32)
    }

    /// Quadrature weight of a single grid cell, (L/n)^d.
    pub fn cell_volume(&self) -> T {
        self.volume() / T::from_usize_lossy(self.len())
    }

    /// Fundamental wavenumber 2π/L.
    pub fn k0(&self) -> T {
        T::lit(2.0) * T::PI() / self.period
    }

    /// Integer modes of a flat index.
    #[inline]
    pub fn modes(&self, flat: usize) -> &[i64; MAX_DIM] {
        &self.tables.modes[flat]
    }

    #[inline]
    pub fn wavevector(&self, flat: usize) -> &[T; MAX_DIM] {
        &self.tables.k[flat]
    }

    #[inline]
    pub fn derivative_wavevector(&self, flat: usize) -> &[T; MAX_DIM] {
        &self.tables.kd[flat]
    }

    #[inline]
    pub fn k_sq(&self, flat: usize) -> T {
        self.tables.k_sq[flat]
    }

    /// Flat index of the mode −k.
    #[inline]
    pub fn conjugate_index(&self, flat: usize) -> usize {
        self.tables.neg[flat]
    }

    /// Largest |m_i| over the axes of a flat index (box "radius").
    pub fn max_abs_mode(&self, flat: usize) -> u64 {
        self.tables.modes[flat][..self.dim]
            .iter()
            .map(|m| m.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Flat index of a signed integer mode tuple, wrapping into the grid.
    pub fn index_of_mode(&self, modes: &[i64]) -> usize {
        let n = self.n as i64;
        let mut idx = [0usize; MAX_DIM];
        for a in 0..self.dim {
            idx[a] = modes[a].rem_euclid(n) as usize;
        }
        flatten(&idx, self.dim, self.n)
    }

    /// Physical coordinates of a flat index.
    pub fn point(&self, flat: usize) -> [T; MAX_DIM] {
        let idx = unflatten(flat, self.dim, self.n);
        let h = self.period / T::from_usize_lossy(self.n);
        let mut x = [T::zero(); MAX_DIM];
        for a in 0..self.dim {
            x[a] = T::from_usize_lossy(idx[a]) * h;
        }
        x
    }

    /// Index of the dealiasing cutoff, ⌊n/3⌋.
    pub fn dealias_cutoff(&self) -> u64 {
        (self.n / 3) as u64
    }

    pub(crate) fn fft_forward(&self) -> &Arc<dyn Fft<T>> {
        &self.tables.forward
    }

    pub(crate) fn fft_inverse(&self) -> &Arc<dyn Fft<T>> {
        &self.tables.inverse
    }

    /// Applies a 1-D transform along every axis of a row-major array.
    pub(crate) fn transform_all_axes(&self, data: &mut [Complex<T>], fft: &Arc<dyn Fft<T>>) {
        let n = self.n;
        let len = self.len();
        let mut line = vec![Complex::new(T::zero(), T::zero()); n];
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let block = stride * n;
            for base in (0..len).step_by(block) {
                for offset in 0..stride {
                    let start = base + offset;
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = data[start + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, value) in line.iter().enumerate() {
                        data[start + j * stride] = *value;
                    }
                }
            }
        }
    }
}

impl<T: Real> PartialEq for TorusGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.period == other.period
    }
}

impl<T: Real> fmt::Debug for TorusGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("dim", &self.dim)
            .field("n_points", &self.n)
            .field("period", &self.period)
            .finish()
    }
}

#[inline]
fn mode_of(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

fn unflatten(mut flat: usize, dim: usize, n: usize) -> [usize; MAX_DIM] {
    let mut idx = [0usize; MAX_DIM];
    for a in (0..dim).rev() {
        idx[a] = flat % n;
        flat /= n;
    }
    idx
}

fn flatten(idx: &[usize; MAX_DIM], dim: usize, n: usize) -> usize {
    idx[..dim].iter().fold(0, |acc, &i| acc * n + i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_resolution() {
        assert!(TorusGrid::<f64>::periodic_2pi(2, 6).is_err());
        assert!(TorusGrid::<f64>::periodic_2pi(2, 9).is_err());
        assert!(TorusGrid::<f64>::periodic_2pi(4, 8).is_err());
        assert!(TorusGrid::<f64>::new(2, 8, -1.0).is_err());
    }

    #[test]
    fn wavenumber_set_runs_from_minus_half_plus_one_to_half() {
        let g = TorusGrid::<f64>::new(2, 8, 1.0).unwrap();
        let mut seen: Vec<i64> = (0..8).map(|j| g.modes(j)[1]).collect();
        seen.sort();
        assert_eq!(seen, vec![-3, -2, -1, 0, 1, 2, 3, 4]);
        let k = g.wavevector(1)[1];
        assert!((k - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        // Nyquist derivative multiplier vanishes.
        assert_eq!(g.derivative_wavevector(4)[1], 0.0);
    }

    #[test]
    fn conjugate_index_is_an_involution() {
        let g = TorusGrid::<f64>::periodic_2pi(3, 8).unwrap();
        for flat in 0..g.len() {
            let c = g.conjugate_index(flat);
            assert_eq!(g.conjugate_index(c), flat);
            for a in 0..3 {
                let (m, mc) = (g.modes(flat)[a], g.modes(c)[a]);
                assert!(m == -mc || (m == 4 && mc == 4));
            }
        }
    }
}
