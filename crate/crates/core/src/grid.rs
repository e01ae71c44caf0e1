//! Time grids.

use crate::error::{check_domain, Error, Result};

pub const DEFAULT_LOG_POINTS: usize = 400;

/// `n` logarithmically spaced times from `t_min` to `t_max` inclusive.
pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    check_domain("t_min", t_min, t_min > 0.0, "t_min > 0")?;
    check_domain("t_max", t_max, t_max > t_min, "t_max > t_min")?;
    if n < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: n,
        });
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    let mut out: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    out[0] = t_min;
    out[n - 1] = t_max;
    Ok(out)
}

/// `n` evenly spaced times from `t_min` to `t_max` inclusive.
pub fn linear_grid(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    check_domain("t_min", t_min, t_min >= 0.0, "t_min >= 0")?;
    check_domain("t_max", t_max, t_max > t_min, "t_max > t_min")?;
    if n < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: n,
        });
    }
    Ok((0..n)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (n - 1) as f64)
        .collect())
}

/// Sorted distinct step indices `round(t/τ)` for the given times.
pub fn steps_for_times(times: &[f64], tau: f64) -> Result<Vec<u64>> {
    check_domain("tau", tau, tau > 0.0, "tau > 0")?;
    let mut steps: Vec<u64> = times
        .iter()
        .map(|t| (t / tau).round().max(0.0) as u64)
        .collect();
    steps.sort_unstable();
    steps.dedup();
    Ok(steps)
}

/// Union of two sorted step lists.
pub fn merge_steps(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}
