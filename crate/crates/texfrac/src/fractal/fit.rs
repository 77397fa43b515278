//! Least-squares fit of log measure against log scale.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A fitted line `y = alpha * x + beta` over log-log samples.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogFit<T> {
    /// Natural logs of the scale values.
    pub log_xs: Vec<T>,
    /// Natural logs of the measure values.
    pub log_ys: Vec<T>,
    /// Slope.
    pub alpha: T,
    /// Intercept.
    pub beta: T,
}

/// Least-squares slope and intercept of `ys` against `xs`:
/// `alpha = cov(x, y) / var(x)`, `beta = mean(y) - alpha * mean(x)`.
///
/// Population moments; the shared 1/n factor cancels in the slope.
/// Returns `DegenerateFit` for fewer than 2 points or zero variance.
pub fn slope_intercept<T: Real>(xs: &[T], ys: &[T]) -> Result<(T, T)> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter(format!(
            "sample length mismatch: {} xs vs {} ys",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least 2 points, got {}",
            xs.len()
        )));
    }
    let n = T::of_usize(xs.len());
    let mean_x = xs.iter().copied().sum::<T>() / n;
    let mean_y = ys.iter().copied().sum::<T>() / n;
    let mut cov = T::zero();
    let mut var = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        cov = cov + dx * (y - mean_y);
        var = var + dx * dx;
    }
    if var == T::zero() {
        return Err(Error::DegenerateFit(
            "all scale values equal (zero variance)".to_string(),
        ));
    }
    let alpha = cov / var;
    let beta = mean_y - alpha * mean_x;
    Ok((alpha, beta))
}

/// Fits a line to `(ln xs, ln ys)`. All inputs must be positive.
pub fn fit_loglog<T: Real>(xs: &[T], ys: &[T]) -> Result<LogLogFit<T>> {
    for &x in xs {
        if !(x > T::zero()) || !x.is_finite() {
            return Err(Error::DomainError(format!("scale {x} not positive finite")));
        }
    }
    for &y in ys {
        if !(y > T::zero()) || !y.is_finite() {
            return Err(Error::DomainError(format!(
                "measure {y} not positive finite"
            )));
        }
    }
    let log_xs: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let log_ys: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    let (alpha, beta) = slope_intercept(&log_xs, &log_ys)?;
    Ok(LogLogFit {
        log_xs,
        log_ys,
        alpha,
        beta,
    })
}
