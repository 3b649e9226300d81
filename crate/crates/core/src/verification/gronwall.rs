use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CbfError, Result};
use crate::scalar::Real;

use super::report::{CheckReport, Tally};

fn validate_grid<T: Real>(t_grid: &[T], series: &[(&str, &[T])]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(CbfError::InvalidArguments("time grid is empty".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] >= w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(CbfError::InvalidArguments(
            "time grid must be finite and non-decreasing".into(),
        ));
    }
    for (name, values) in series {
        if values.len() != t_grid.len() {
            return Err(CbfError::InvalidArguments(format!(
                "{name} has {} samples, time grid has {}",
                values.len(),
                t_grid.len()
            )));
        }
        if values.iter().any(|v| !(*v >= T::zero() && v.is_finite())) {
            return Err(CbfError::InvalidArguments(format!(
                "{name} must be finite and non-negative"
            )));
        }
    }
    Ok(())
}

/// Running trapezoidal integral, starting at zero.
pub fn cumulative_trapezoid<T: Real>(values: &[T], t_grid: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = T::zero();
    for i in 0..values.len() {
        if i > 0 {
            acc = acc + (t_grid[i] - t_grid[i - 1]) * T::lit(0.5) * (values[i] + values[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// (a + ∫₀ᵗf₁)·exp(∫₀ᵗf₂) at each grid time.
pub fn gronwall_envelope<T: Real>(a: T, f1: &[T], f2: &[T], t_grid: &[T]) -> Result<Vec<T>> {
    validate_grid(t_grid, &[("f1", f1), ("f2", f2)])?;
    if !(a >= T::zero() && a.is_finite()) {
        return Err(CbfError::InvalidArguments(format!("a must be non-negative, got {a}")));
    }
    let i1 = cumulative_trapezoid(f1, t_grid);
    let i2 = cumulative_trapezoid(f2, t_grid);
    Ok(i1.iter().zip(&i2).map(|(x, y)| (a + *x) * y.exp()).collect())
}

/// {c^{1−α}e^{(1−α)A(t)} + (1−α)∫₀ᵗ b(s)e^{(1−α)(A(t)−A(s))}ds}^{1/(1−α)} with
/// A(t) = ∫₀ᵗ a.
pub fn nonlinear_gronwall_envelope<T: Real>(c: T, a: &[T], b: &[T], alpha_exp: T, t_grid: &[T]) -> Result<Vec<T>> {
    if !(alpha_exp >= T::zero() && alpha_exp < T::one()) {
        return Err(CbfError::InvalidArguments(format!(
            "exponent must lie in [0, 1), got {alpha_exp}"
        )));
    }
    validate_grid(t_grid, &[("a", a), ("b", b)])?;
    if !(c >= T::zero() && c.is_finite()) {
        return Err(CbfError::InvalidArguments(format!("c must be non-negative, got {c}")));
    }
    let k = T::one() - alpha_exp;
    let big_a = cumulative_trapezoid(a, t_grid);
    let weighted: Vec<T> = b.iter().zip(&big_a).map(|(bv, av)| *bv * (-k * *av).exp()).collect();
    let j = cumulative_trapezoid(&weighted, t_grid);
    let c_pow = if c == T::zero() { T::zero() } else { c.powf(k) };
    Ok(big_a
        .iter()
        .zip(&j)
        .map(|(av, jv)| {
            let growth = (k * *av).exp();
            (c_pow * growth + k * growth * *jv).powf(T::one() / k)
        })
        .collect())
}

fn rk4(f: impl Fn(f64, f64) -> f64, y0: f64, t_grid: &[f64]) -> Vec<f64> {
    let mut y = vec![y0];
    for w in t_grid.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        let yn = *y.last().expect("non-empty");
        let k1 = f(t, yn);
        let k2 = f(t + h / 2.0, yn + h / 2.0 * k1);
        let k3 = f(t + h / 2.0, yn + h / 2.0 * k2);
        let k4 = f(t + h, yn + h * k3);
        y.push(yn + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    y
}

/// Smooth non-negative coefficient c₀(1 + ½sin(ωt + φ)).
fn coefficient(rng: &mut ChaCha8Rng, max: f64) -> impl Fn(f64) -> f64 {
    let c0 = rng.random_range(0.0..max);
    let omega = rng.random_range(1.0..5.0);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    move |t: f64| c0 * (1.0 + 0.5 * (omega * t + phase).sin())
}

/// Both Grönwall envelopes against numerically integrated synthetic
/// solutions on [0, t_end]:
/// y′ = f₁ + f₂y − f with y(0) = a (linear lemma, checking y + ∫f), and
/// y′ = ay + by^α with y(0) = c (nonlinear lemma).
///
/// The nonlinear case attains the envelope, so its margin is the O(h²)
/// quadrature error; about 2·10⁴ grid points per unit time keep it inside
/// the tolerance.
pub fn check_gronwall_synthetic(seed: u64, n_samples: usize, t_end: f64, n_points: usize) -> Result<CheckReport> {
    gronwall_synthetic(seed, n_samples, t_end, n_points, None)
}

/// [`check_gronwall_synthetic`] with the exponent of the nonlinear lemma
/// fixed instead of drawn.
pub fn check_gronwall_synthetic_with_alpha(
    seed: u64,
    n_samples: usize,
    t_end: f64,
    n_points: usize,
    alpha: f64,
) -> Result<CheckReport> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(CbfError::InvalidArguments(format!(
            "exponent must lie in [0, 1), got {alpha}"
        )));
    }
    gronwall_synthetic(seed, n_samples, t_end, n_points, Some(alpha))
}

fn gronwall_synthetic(
    seed: u64,
    n_samples: usize,
    t_end: f64,
    n_points: usize,
    fixed_alpha: Option<f64>,
) -> Result<CheckReport> {
    if n_points < 2 || !(t_end > 0.0) {
        return Err(CbfError::InvalidArguments(
            "need t_end > 0 and at least two grid points".into(),
        ));
    }
    let t_grid: Vec<f64> = (0..n_points)
        .map(|i| t_end * i as f64 / (n_points - 1) as f64)
        .collect();
    let mut linear = Tally::new("linear lemma", 1e-8);
    let mut nonlinear = Tally::new("nonlinear lemma", 1e-8);
    for i in 0..n_samples {
        let s = seed.wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(s);

        let (f1, f2, f) = (
            coefficient(&mut rng, 2.0),
            coefficient(&mut rng, 2.0),
            coefficient(&mut rng, 1.0),
        );
        let a0 = rng.random_range(0.0..2.0);
        let y = rk4(|t, y| f1(t) + f2(t) * y - f(t), a0, &t_grid);
        let fs: Vec<f64> = t_grid.iter().map(|t| f(*t)).collect();
        let int_f = cumulative_trapezoid(&fs, &t_grid);
        let f1s: Vec<f64> = t_grid.iter().map(|t| f1(*t)).collect();
        let f2s: Vec<f64> = t_grid.iter().map(|t| f2(*t)).collect();
        let env = gronwall_envelope(a0, &f1s, &f2s, &t_grid)?;
        for j in 0..n_points {
            let lhs = y[j] + int_f[j];
            linear.record(s, env[j] - lhs, env[j]);
        }

        let (a, b) = (coefficient(&mut rng, 2.0), coefficient(&mut rng, 2.0));
        let drawn = rng.random_range(0.0..0.9);
        let alpha = fixed_alpha.unwrap_or(drawn);
        let c = rng.random_range(0.1..2.0);
        let y = rk4(|t, y| a(t) * y + b(t) * y.max(0.0).powf(alpha), c, &t_grid);
        let as_: Vec<f64> = t_grid.iter().map(|t| a(*t)).collect();
        let bs: Vec<f64> = t_grid.iter().map(|t| b(*t)).collect();
        let env = nonlinear_gronwall_envelope(c, &as_, &bs, alpha, &t_grid)?;
        for j in 0..n_points {
            nonlinear.record(s, env[j] - y[j], env[j]);
        }
    }
    Ok(CheckReport::combine(
        "gronwall_synthetic",
        vec![linear.finish(), nonlinear.finish()],
    ))
}
