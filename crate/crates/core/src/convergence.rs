//! Observed-order estimation for refinement ladders.

use std::io::Write;

use crate::error::{CbfError, Result};
use crate::scalar::Real;

/// One rung of a refinement ladder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow<T: Real> {
    /// Step size (or 1/N for resolution ladders).
    pub h: T,
    pub error: T,
    /// Order observed between this rung and the previous one.
    pub order: Option<T>,
}

fn check_ladder<T: Real>(hs: &[T], values_len: usize) -> Result<()> {
    if hs.len() != values_len {
        return Err(CbfError::InvalidArguments(format!(
            "ladder has {} step sizes but {values_len} values",
            hs.len()
        )));
    }
    if hs.len() < 3 {
        return Err(CbfError::InvalidArguments(format!(
            "a convergence ladder needs at least 3 levels, got {}",
            hs.len()
        )));
    }
    if hs.iter().any(|h| !(*h > T::zero() && h.is_finite())) || hs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(CbfError::InvalidArguments(
            "step sizes must be positive and strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// log(e_i/e_{i+1}) / log(h_i/h_{i+1}) for consecutive rungs with known
/// errors.
pub fn observed_orders<T: Real>(hs: &[T], errors: &[T]) -> Result<Vec<T>> {
    check_ladder(hs, errors.len())?;
    Ok(hs
        .windows(2)
        .zip(errors.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect())
}

/// Orders from differences of successive solutions when no reference is
/// available: log(|q_i − q_{i+1}| / |q_{i+1} − q_{i+2}|) / log(h_i/h_{i+1}).
pub fn richardson_orders<T: Real>(hs: &[T], values: &[T]) -> Result<Vec<T>> {
    check_ladder(hs, values.len())?;
    Ok(values
        .windows(3)
        .zip(hs.windows(2))
        .map(|(q, h)| ((q[0] - q[1]).abs() / (q[1] - q[2]).abs()).ln() / (h[0] / h[1]).ln())
        .collect())
}

/// Rows pairing each rung with the order observed against the previous one.
pub fn convergence_table<T: Real>(hs: &[T], errors: &[T]) -> Result<Vec<ConvergenceRow<T>>> {
    let orders = observed_orders(hs, errors)?;
    Ok(hs
        .iter()
        .zip(errors)
        .enumerate()
        .map(|(i, (h, e))| ConvergenceRow {
            h: *h,
            error: *e,
            order: i.checked_sub(1).map(|j| orders[j]),
        })
        .collect())
}

/// Tab-delimited `h  error  order` table; the first order cell is `-`.
pub fn write_table<T: Real>(mut w: impl Write, h_label: &str, rows: &[ConvergenceRow<T>]) -> std::io::Result<()> {
    writeln!(w, "{h_label}\terror\torder")?;
    for row in rows {
        let order = row
            .order
            .map(|o| format!("{:.6}", o.to_f64_lossy()))
            .unwrap_or_else(|| "-".into());
        writeln!(
            w,
            "{:.6e}\t{:.17e}\t{order}",
            row.h.to_f64_lossy(),
            row.error.to_f64_lossy()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let hs = [0.4, 0.2, 0.1];
        let errs: Vec<f64> = hs.iter().map(|h| 3.0 * h * h).collect();
        for o in observed_orders(&hs, &errs).unwrap() {
            assert!((o - 2.0).abs() < 1e-12);
        }
        let q: Vec<f64> = hs.iter().map(|h| 1.0 + 0.5 * h).collect();
        let r = richardson_orders(&hs, &q).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn short_ladder_rejected() {
        assert!(matches!(
            observed_orders(&[0.2, 0.1], &[1.0, 0.5]),
            Err(CbfError::InvalidArguments(_))
        ));
        assert!(observed_orders(&[0.1, 0.2, 0.05], &[1.0, 0.5, 0.2]).is_err());
    }
}
