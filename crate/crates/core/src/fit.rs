//! Least-squares helpers for scaling exponents and small-time coefficients.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Slope of `ln y` against `ln x`.
pub fn loglog_slope<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidInput("log-log fit needs two or more paired samples".into()));
    }
    if xs.iter().chain(ys.iter()).any(|v| !(*v > T::zero())) {
        return Err(Error::InvalidInput("log-log fit needs positive samples".into()));
    }
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    linear_slope(&lx, &ly)
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn linear_slope<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    let n = T::from_count(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = ys.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == T::zero() {
        return Err(Error::InvalidInput("degenerate abscissae".into()));
    }
    Ok(sxy / sxx)
}

/// `c` minimizing `sum (y - c x^2)^2`.
pub fn quadratic_coefficient<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    let mut num = T::zero();
    let mut den = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let x2 = x * x;
        num += x2 * y;
        den += x2 * x2;
    }
    if den == T::zero() {
        return Err(Error::InvalidInput("quadratic fit needs a nonzero abscissa".into()));
    }
    Ok(num / den)
}

/// `n` points spaced evenly in `ln x` over `[a, b]`.
pub fn log_space<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * T::from_count(i) / T::from_count(n - 1)).exp())
        .collect()
}
