//! Bessel functions `J0`, `J1` of real argument.
//!
//! Power series up to `x = 8`, Miller's backward recurrence up to `x = 25`,
//! and the Hankel asymptotic expansion beyond.

use crate::error::{Error, Result};
use crate::scalar::Real;

const SERIES_MAX: f64 = 8.0;
const MILLER_MAX: f64 = 25.0;

/// `J_order(x)` for `order` in `{0, 1}` and `x >= 0`.
pub fn bessel_j<T: Real>(order: u32, x: T) -> Result<T> {
    if order > 1 {
        return Err(Error::Domain(format!("Bessel order {order} not supported (0 or 1)")));
    }
    if !(x >= T::zero()) || !x.is_finite() {
        return Err(Error::Domain("Bessel argument must be finite and >= 0".into()));
    }
    let (j0, j1) = bessel_j01(x);
    Ok(if order == 0 { j0 } else { j1 })
}

/// `(J0(x), J1(x))` for finite `x >= 0`.
pub fn bessel_j01<T: Real>(x: T) -> (T, T) {
    if x <= T::lit(SERIES_MAX) {
        series(x)
    } else if x <= T::lit(MILLER_MAX) {
        miller(x)
    } else {
        hankel(x)
    }
}

/// Leading large-argument form `sqrt(2/(pi x)) cos(x - (2 order + 1) pi / 4)`.
pub fn bessel_j_asymptotic<T: Real>(order: u32, x: T) -> T {
    let phase = T::lit(2.0 * order as f64 + 1.0) * T::FRAC_PI_4();
    (T::lit(2.0) / (T::PI() * x)).sqrt() * (x - phase).cos()
}

fn series<T: Real>(x: T) -> (T, T) {
    let h = x / T::lit(2.0);
    let h2 = h * h;
    let mut t0 = T::one();
    let mut t1 = h;
    let mut s0 = t0;
    let mut s1 = t1;
    for k in 1..60 {
        let kk = T::from_count(k);
        t0 = -t0 * h2 / (kk * kk);
        t1 = -t1 * h2 / (kk * (kk + T::one()));
        s0 += t0;
        s1 += t1;
        if t0.abs() < T::epsilon() * T::lit(1e-3) && t1.abs() < T::epsilon() * T::lit(1e-3) {
            break;
        }
    }
    (s0, s1)
}

fn miller<T: Real>(x: T) -> (T, T) {
    // Start well above x; the recurrence is stable downwards.
    let start = (x.to_f64().unwrap_or(MILLER_MAX) as usize + 40) & !1;
    let two_over_x = T::lit(2.0) / x;
    let mut jp = T::zero();
    let mut j = T::lit(1e-30);
    let mut norm = T::zero();
    let (mut j0, mut j1) = (T::zero(), T::zero());
    for n in (1..=start).rev() {
        let jm = T::from_count(n) * two_over_x * j - jp;
        jp = j;
        j = jm;
        // j now holds J_{n-1}.
        if (n - 1) % 2 == 0 && n > 1 {
            norm += T::lit(2.0) * j;
        }
        if n == 2 {
            j1 = j;
        }
        if n == 1 {
            j0 = j;
        }
        if j.abs() > T::lit(1e100) {
            jp *= T::lit(1e-100);
            j *= T::lit(1e-100);
            norm *= T::lit(1e-100);
            j1 *= T::lit(1e-100);
        }
    }
    let norm = norm + j0;
    (j0 / norm, j1 / norm)
}

fn hankel<T: Real>(x: T) -> (T, T) {
    let (p0, q0) = hankel_pq(0, x);
    let (p1, q1) = hankel_pq(1, x);
    let (s, c) = x.sin_cos();
    let r = T::SQRT_2().recip();
    // chi0 = x - pi/4, chi1 = x - 3pi/4
    let (c0, s0) = ((c + s) * r, (s - c) * r);
    let (c1, s1) = ((s - c) * r, -(s + c) * r);
    let amp = (T::lit(2.0) / (T::PI() * x)).sqrt();
    (amp * (p0 * c0 - q0 * s0), amp * (p1 * c1 - q1 * s1))
}

fn hankel_pq<T: Real>(order: u32, x: T) -> (T, T) {
    let mu = T::lit(4.0 * (order * order) as f64);
    let eight_x = T::lit(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::infinity();
    for k in 1..60usize {
        let odd = T::from_count(2 * k - 1);
        term = term * (mu - odd * odd) / (T::from_count(k) * eight_x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        // a_k / x^k alternates into Q (odd k) and P (even k) with signs (-1)^{floor(k/2)}.
        let sign = if (k / 2) % 2 == 0 { T::one() } else { -T::one() };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term.abs() < T::epsilon() * T::lit(1e-3) {
            break;
        }
    }
    (p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    // (x, J0, J1) from 30-digit references.
    const REF: [(f64, f64, f64); 10] = [
        (0.5, 0.93846980724081290423, 0.24226845767487388638),
        (2.0, 0.22389077914123566805, 0.5767248077568733872),
        (7.9, 0.19436184484127831756, 0.21917939992175114408),
        (8.1, 0.14751745404437758233, 0.24760776698159291818),
        (10.0, -0.2459357644513483352, 0.04347274616886143667),
        (24.9, 0.083245968353015681694, -0.13485569953140874334),
        (25.1, 0.10827567149994928907, -0.11463478413442272782),
        (50.0, 0.055812327669251815005, -0.097511828125175137661),
        (200.0, -0.015437439930565091592, -0.054304538182378222711),
        (1000.0, 0.024786686152420174561, 0.0047283119070895239176),
    ];

    #[test]
    fn reference_values() {
        for (x, j0, j1) in REF {
            let (a, b) = bessel_j01(x);
            assert!((a - j0).abs() < 1e-13, "J0({x}) = {a} vs {j0}");
            assert!((b - j1).abs() < 1e-13, "J1({x}) = {b} vs {j1}");
        }
    }

    #[test]
    fn origin_and_domain() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert!(bessel_j(2, 1.0).is_err());
        assert!(bessel_j(0, -1.0).is_err());
    }

    #[test]
    fn wronskian_like_identity() {
        // J0' = -J1; check by central differences across all three regimes.
        for x in [3.0_f64, 12.0, 40.0] {
            let h = 1e-5;
            let d = (bessel_j01(x + h).0 - bessel_j01(x - h).0) / (2.0 * h);
            assert!((d + bessel_j01(x).1).abs() < 1e-9);
        }
    }

    #[test]
    fn asymptotic_form_is_close_for_large_argument() {
        for i in 0..200 {
            let t = 5.0 + i as f64 * 0.5;
            let x = 2.0 * t;
            let exact = bessel_j01(x).0;
            let lead = (1.0 / (std::f64::consts::PI * t)).sqrt() * (x - std::f64::consts::FRAC_PI_4).cos();
            assert!((exact - lead).abs() < 0.02);
            assert!((bessel_j_asymptotic(0, x) - lead).abs() < 1e-14);
        }
    }

    #[test]
    fn single_precision() {
        let (a, b) = bessel_j01(2.0_f32);
        assert!((a - 0.223_890_78).abs() < 1e-6 && (b - 0.576_724_8).abs() < 1e-6);
    }
}
