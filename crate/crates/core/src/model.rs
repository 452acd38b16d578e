//! The emitter + tight-binding chain model: parameters, the band dispersion,
//! the `lambda <-> E` maps and the self-energy on both Riemann sheets.
//!
//! Units: hopping `J = 1`, lattice constant `1`, `hbar = 1`. The canonical
//! spectral variable is `lambda = e^{ik}`; every sheet decision reduces to
//! `|lambda| < 1` (first sheet) or `|lambda| > 1` (second sheet).

use crate::error::{Error, Result};
use crate::scalar::{c, re, Cplx, Real};

/// Emitter energy `epsilon_d` and emitter-chain coupling `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    epsilon_d: T,
    g: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(epsilon_d: T, g: T) -> Result<Self> {
        if !epsilon_d.is_finite() || !g.is_finite() {
            return Err(Error::InvalidInput("model parameters must be finite".into()));
        }
        if g < T::zero() {
            return Err(Error::InvalidInput(format!("coupling g = {g} must be >= 0")));
        }
        Ok(Self { epsilon_d, g })
    }

    /// Emitter tuned to the lower band edge, `epsilon_d = -2`.
    pub fn at_threshold(g: T) -> Result<Self> {
        Self::new(-T::lit(2.0), g)
    }

    #[inline]
    pub fn epsilon_d(&self) -> T {
        self.epsilon_d
    }

    #[inline]
    pub fn g(&self) -> T {
        self.g
    }
}

/// Riemann sheet of the self-energy / resolvent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sheet {
    /// Physical sheet, `|lambda| < 1`.
    First,
    /// Unphysical sheet reached through the cut, `|lambda| > 1`.
    Second,
}

impl Sheet {
    /// Sheet that a given `lambda` lives on, or `None` on the unit circle.
    pub fn of_lambda<T: Real>(lambda: Cplx<T>) -> Option<Sheet> {
        let dist = T::one() - lambda.norm();
        if dist.abs() < on_cut_tolerance::<T>() {
            None
        } else if dist > T::zero() {
            Some(Sheet::First)
        } else {
            Some(Sheet::Second)
        }
    }
}

/// `|1 - |lambda|| below this counts as "on the cut".
#[inline]
pub fn on_cut_tolerance<T: Real>() -> T {
    T::tol(1e-10, 64.0)
}

/// Band dispersion `E_k = -2 cos k`.
#[inline]
pub fn band_energy<T: Real>(k: T) -> T {
    -T::lit(2.0) * k.cos()
}

/// `E = -lambda - 1/lambda`.
pub fn energy_from_lambda<T: Real>(lambda: Cplx<T>) -> Result<Cplx<T>> {
    if lambda.norm_sqr() == T::zero() {
        return Err(Error::Domain("lambda = 0 has no energy".into()));
    }
    Ok(-lambda - lambda.inv())
}

/// Both roots of `lambda^2 + E lambda + 1 = 0`, ordered `(|lambda| <= 1, |lambda| >= 1)`.
/// Their product is exactly one in exact arithmetic.
pub fn lambda_pair<T: Real>(energy: Cplx<T>) -> (Cplx<T>, Cplx<T>) {
    let two = T::lit(2.0);
    let disc = (energy * energy - re(T::lit(4.0))).sqrt();
    // Pick the sum that avoids cancellation, then use the product = 1.
    let a = (-energy + disc) / two;
    let b = (-energy - disc) / two;
    let big = if a.norm_sqr() >= b.norm_sqr() { a } else { b };
    let small = big.inv();
    (small, big)
}

/// Root of `lambda^2 + E lambda + 1 = 0` on the requested sheet.
///
/// Fails with [`Error::BranchCut`] when both roots sit on the unit circle,
/// i.e. `E` is on the cut `[-2, 2]` (including the degenerate edges).
pub fn lambda_from_energy<T: Real>(energy: Cplx<T>, sheet: Sheet) -> Result<Cplx<T>> {
    let (small, big) = lambda_pair(energy);
    if (T::one() - small.norm()).abs() < on_cut_tolerance::<T>() {
        return Err(Error::BranchCut {
            root_a_re: small.re.to_f64().unwrap_or(f64::NAN),
            root_a_im: small.im.to_f64().unwrap_or(f64::NAN),
            root_b_re: big.re.to_f64().unwrap_or(f64::NAN),
            root_b_im: big.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(match sheet {
        Sheet::First => small,
        Sheet::Second => big,
    })
}

/// Density of states of the band, `1/sqrt(4 - E^2)` for `|E| < 2`.
pub fn density_of_states<T: Real>(energy: T) -> Result<T> {
    let gap = T::lit(4.0) - energy * energy;
    if !(gap > T::zero()) {
        return Err(Error::Domain(format!(
            "density of states diverges or vanishes at |E| = {} >= 2",
            energy.abs()
        )));
    }
    Ok(gap.sqrt().recip())
}

/// Self-energy `Sigma(E)` of the emitter on the given sheet.
///
/// Off the real in-band segment this is evaluated in the `lambda` plane as
/// `Sigma = g^2 / (lambda - 1/lambda)` with `lambda` the sheet root of `E`.
/// For real `|E| < 2` the first-sheet value is the upper-lip expression
/// `-g^2 / (i sqrt(4 - E^2)) = +i g^2 / sqrt(4 - E^2)` taken verbatim; the
/// second-sheet value flips the sign of the root. Note that this in-band
/// convention has a positive imaginary part, opposite to the limit of the
/// `lambda`-plane formula from `Im E > 0`, which gives the usual retarded
/// `-i g^2 / sqrt(4 - E^2)`.
pub fn self_energy<T: Real>(params: &ModelParams<T>, energy: Cplx<T>, sheet: Sheet) -> Result<Cplx<T>> {
    let g2 = params.g() * params.g();
    let two = T::lit(2.0);
    if energy.im == T::zero() && (energy.re.abs() - two).abs() <= on_cut_tolerance::<T>() {
        return Err(Error::BranchPoint(energy.re.to_f64().unwrap_or(f64::NAN)));
    }
    if g2 == T::zero() {
        return Ok(Cplx::new(T::zero(), T::zero()));
    }
    if energy.im == T::zero() && energy.re.abs() < two {
        let root = (T::lit(4.0) - energy.re * energy.re).sqrt();
        let first = -re(g2) / (c(T::zero(), root));
        return Ok(match sheet {
            Sheet::First => first,
            Sheet::Second => -first,
        });
    }
    let lambda = lambda_from_energy(energy, sheet)?;
    Ok(re(g2) / (lambda - lambda.inv()))
}

/// 2x2 effective Hamiltonian on `{|0>, |d>}` after eliminating the rest of
/// the chain, written in the `lambda = e^{ik}` variable:
/// `[[-2 lambda, -g], [-g, epsilon_d]]`.
pub fn effective_hamiltonian<T: Real>(params: &ModelParams<T>, lambda: Cplx<T>) -> Result<[[Cplx<T>; 2]; 2]> {
    if lambda.norm_sqr() == T::zero() {
        return Err(Error::Domain("lambda = 0".into()));
    }
    let mg = re(-params.g());
    Ok([
        [lambda * (-T::lit(2.0)), mg],
        [mg, re(params.epsilon_d())],
    ])
}

/// `det(H_eff(lambda) - E(lambda) I)`; vanishes exactly at discrete eigenvalues.
pub fn effective_determinant<T: Real>(params: &ModelParams<T>, lambda: Cplx<T>) -> Result<Cplx<T>> {
    let h = effective_hamiltonian(params, lambda)?;
    let e = energy_from_lambda(lambda)?;
    Ok((h[0][0] - e) * (h[1][1] - e) - h[0][1] * h[1][0])
}
