//! Minimal double-word arithmetic (value = hi + lo) used to evaluate
//! polynomial residuals at twice the working precision during root polish.

use crate::scalar::{Cplx, Real};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Twofold<T> {
    pub hi: T,
    pub lo: T,
}

#[inline]
fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod<T: Real>(a: T, b: T) -> (T, T) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl<T: Real> Twofold<T> {
    #[inline]
    pub fn from(x: T) -> Self {
        Self { hi: x, lo: T::zero() }
    }

    #[inline]
    pub fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = two_sum(s, e);
        Self { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    #[inline]
    pub fn mul_scalar(self, b: T) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = two_sum(p, e);
        Self { hi, lo }
    }

    #[inline]
    pub fn value(self) -> T {
        self.hi + self.lo
    }
}

/// Complex number with double-word components.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TwofoldComplex<T> {
    pub re: Twofold<T>,
    pub im: Twofold<T>,
}

impl<T: Real> TwofoldComplex<T> {
    #[inline]
    pub fn from(z: Cplx<T>) -> Self {
        Self { re: Twofold::from(z.re), im: Twofold::from(z.im) }
    }

    #[inline]
    pub fn add(self, z: Self) -> Self {
        Self { re: self.re.add(z.re), im: self.im.add(z.im) }
    }

    /// Product with a working-precision complex number.
    #[inline]
    pub fn mul_c(self, z: Cplx<T>) -> Self {
        let re = self.re.mul_scalar(z.re).sub(self.im.mul_scalar(z.im));
        let im = self.re.mul_scalar(z.im).add(self.im.mul_scalar(z.re));
        Self { re, im }
    }

    #[inline]
    pub fn value(self) -> Cplx<T> {
        Cplx::new(self.re.value(), self.im.value())
    }
}

/// Horner evaluation of `sum coeffs[k] z^k` (coefficients in ascending order)
/// carried out in double-word arithmetic.
pub(crate) fn horner_twofold<T: Real>(coeffs: &[Cplx<T>], z: Cplx<T>) -> Cplx<T> {
    let mut acc = TwofoldComplex::from(Cplx::new(T::zero(), T::zero()));
    for &a in coeffs.iter().rev() {
        acc = acc.mul_c(z).add(TwofoldComplex::from(a));
    }
    acc.value()
}
