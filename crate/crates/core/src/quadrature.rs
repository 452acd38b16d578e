//! Adaptive Gauss-Kronrod (7, 15) quadrature for real, complex and small
//! vector-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Values that can be integrated: closed under addition and real scaling,
/// with a norm for error control.
pub trait QuadValue<T: Real>: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, s: T) -> Self;
    fn norm(self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: T) -> Self {
        self * s
    }
    fn norm(self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Cplx<T> {
    fn zero() -> Self {
        Cplx::new(T::zero(), T::zero())
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: T) -> Self {
        self * s
    }
    fn norm(self) -> T {
        Cplx::norm(self)
    }
}

impl<T: Real, const N: usize> QuadValue<T> for [Cplx<T>; N] {
    fn zero() -> Self {
        [Cplx::new(T::zero(), T::zero()); N]
    }
    fn add(mut self, other: Self) -> Self {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b;
        }
        self
    }
    fn scale(mut self, s: T) -> Self {
        for a in self.iter_mut() {
            *a *= s;
        }
        self
    }
    fn norm(self) -> T {
        self.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }
}

/// One 15-point Kronrod estimate and its difference from the embedded
/// 7-point Gauss rule.
pub fn gk15<T: Real, V: QuadValue<T>, F: FnMut(T) -> V>(f: &mut F, a: T, b: T) -> (V, T) {
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let fc = f(mid);
    let mut kron = fc.scale(T::lit(WGK[7]));
    let mut gauss = fc.scale(T::lit(WG[3]));
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let s = f(mid - dx).add(f(mid + dx));
        kron = kron.add(s.scale(T::lit(WGK[j])));
        if j % 2 == 1 {
            gauss = gauss.add(s.scale(T::lit(WG[j / 2])));
        }
    }
    let k = kron.scale(half);
    let g = gauss.scale(half);
    (k, k.add(g.scale(-T::one())).norm())
}

/// Globally adaptive integration on `[a, b]` to absolute tolerance
/// `abs_tol`: the panel with the largest error estimate is bisected until the
/// summed estimate meets the tolerance.
pub fn integrate<T: Real, V: QuadValue<T>, F: FnMut(T) -> V>(f: F, a: T, b: T, abs_tol: T) -> Result<V> {
    integrate_with_limit(f, a, b, abs_tol, DEFAULT_MAX_PANELS)
}

pub const DEFAULT_MAX_PANELS: usize = 4000;

struct Panel<T, V> {
    a: T,
    b: T,
    value: V,
    err: T,
}

impl<T: Real, V> PartialEq for Panel<T, V> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T: Real, V> Eq for Panel<T, V> {}
impl<T: Real, V> PartialOrd for Panel<T, V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real, V> Ord for Panel<T, V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

pub fn integrate_with_limit<T: Real, V: QuadValue<T>, F: FnMut(T) -> V>(
    mut f: F,
    a: T,
    b: T,
    abs_tol: T,
    max_panels: usize,
) -> Result<V> {
    let (value, err) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, err });
    let mut total = err;
    let mut frozen_err = T::zero();
    let mut frozen = V::zero();
    loop {
        let estimate = heap.iter().fold(frozen, |acc, p| acc.add(p.value));
        // Roundoff floor: errors below a few ulps of the result are noise.
        let floor = T::epsilon() * T::lit(50.0) * estimate.norm();
        if !floor.is_finite() {
            return Err(Error::Quadrature {
                requested: abs_tol.to_f64().unwrap_or(f64::NAN),
                achieved: f64::INFINITY,
            });
        }
        if total + frozen_err <= abs_tol.max(floor) {
            return Ok(estimate);
        }
        let fail = Error::Quadrature {
            requested: abs_tol.to_f64().unwrap_or(f64::NAN),
            achieved: (total + frozen_err).to_f64().unwrap_or(f64::NAN),
        };
        if heap.len() >= max_panels {
            return Err(fail);
        }
        let Some(worst) = heap.pop() else {
            return Err(fail);
        };
        total -= worst.err;
        let mid = (worst.a + worst.b) / T::lit(2.0);
        if !(mid > worst.a && mid < worst.b) {
            // Panel cannot be split further in this precision.
            frozen_err += worst.err;
            frozen = frozen.add(worst.value);
            continue;
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err) = gk15(&mut f, lo, hi);
            total += err;
            heap.push(Panel { a: lo, b: hi, value, err });
        }
        if total < T::zero() {
            total = heap.iter().fold(T::zero(), |acc, p| acc + p.err);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        // Kronrod part is exact through degree 22, Gauss through degree 13.
        let (v, _) = gk15(&mut |x: f64| x.powi(22), -1.0, 1.0);
        assert!((v - 2.0 / 23.0).abs() < 1e-15);
        let (v, e) = gk15(&mut |x: f64| x.powi(12), -1.0, 1.0);
        assert!((v - 2.0 / 13.0).abs() < 1e-15 && e < 1e-15);
    }

    #[test]
    fn oscillatory_complex() {
        let v = integrate(|x: f64| Cplx::new(0.0, 3.0 * x).exp(), 0.0, 50.0, 1e-12).unwrap();
        let exact = (Cplx::new(0.0, 150.0).exp() - 1.0) / Cplx::new(0.0, 3.0);
        assert!((v - exact).norm() < 1e-11);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate(|x: f64| x.ln(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v + 1.0).abs() < 1e-10);
    }

    #[test]
    fn vector_values() {
        let v: [Cplx<f64>; 2] =
            integrate(|x: f64| [Cplx::new(x, 0.0), Cplx::new(0.0, x * x)], 0.0, 1.0, 1e-14).unwrap();
        assert!((v[0].re - 0.5).abs() < 1e-15 && (v[1].im - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn reports_failure() {
        let r = integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-12);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
