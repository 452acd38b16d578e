//! Emitter at the edge of a generic continuum with a square-root threshold.
//!
//! Near `E_th` the self-energy splits as `g^2 Delta(E) + g^2 Lambda(E) / sqrt(E_th - E)`.
//! With the emitter tuned to `E_th` and `x = sqrt(E_th - E)` the dispersion
//! relation becomes the cubic `x^3 + g^2 Delta x + g^2 Lambda = 0`, whose three
//! roots meet at `E_th` like `g^(4/3)` whenever `Lambda(E_th) != 0`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::quadrature::integrate;
use crate::scalar::{c, re, Cplx, Real};

/// Analytic coefficient function, evaluated at complex energy.
pub type Coefficient<T> = Arc<dyn Fn(Cplx<T>) -> Cplx<T> + Send + Sync>;

/// Coupling profile `v(k)` for a parabolic band `E_k = E_th + k^2`.
#[derive(Clone)]
pub enum Profile<T> {
    /// `v(k) = v0`.
    Constant(T),
    /// `v(k) = 1 / (1 + k^2)`.
    Lorentzian,
    /// `v(k) = |k|^(-1/4)`, singular at the band edge.
    InverseQuarterRoot,
    Custom(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: Real> Profile<T> {
    pub fn value(&self, k: T) -> T {
        match self {
            Profile::Constant(v) => *v,
            Profile::Lorentzian => T::one() / (T::one() + k * k),
            Profile::InverseQuarterRoot => k.abs().powf(T::lit(-0.25)),
            Profile::Custom(f) => f(k),
        }
    }
}

impl<T> fmt::Debug for Profile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Constant(_) => "Constant",
            Profile::Lorentzian => "Lorentzian",
            Profile::InverseQuarterRoot => "InverseQuarterRoot",
            Profile::Custom(_) => "Custom",
        })
    }
}

/// The continuum the emitter couples to.
#[derive(Debug, Clone)]
pub enum Reservoir<T> {
    /// `E_k = E_th + k^2`, `k` real, with coupling profile `v(k)`.
    Parabolic(Profile<T>),
    /// The chain of the main model: `E_k = -2 cos k`, `E_th = -2`.
    TightBinding,
}

/// Self-energy model with its threshold decomposition.
#[derive(Clone)]
pub struct GenericSelfEnergyModel<T> {
    pub name: String,
    pub e_th: T,
    pub g: T,
    pub reservoir: Reservoir<T>,
    /// `(Delta, Lambda)`; absent when the self-energy has no square-root form.
    pub coefficients: Option<(Coefficient<T>, Coefficient<T>)>,
}

impl<T: fmt::Debug> fmt::Debug for GenericSelfEnergyModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericSelfEnergyModel")
            .field("name", &self.name)
            .field("e_th", &self.e_th)
            .field("g", &self.g)
            .field("reservoir", &self.reservoir)
            .field("has_coefficients", &self.coefficients.is_some())
            .finish()
    }
}

impl<T: Real> GenericSelfEnergyModel<T> {
    /// User-supplied model on a parabolic band. The profile must be finite
    /// at `k = 0`.
    pub fn new(
        name: impl Into<String>,
        e_th: T,
        g: T,
        delta: Coefficient<T>,
        lambda: Coefficient<T>,
        profile: Profile<T>,
    ) -> Result<Self> {
        if !profile.value(T::zero()).is_finite() {
            return Err(Error::NoSquareRootLimit("coupling profile is singular at k = 0".into()));
        }
        check_g(g)?;
        Ok(Self {
            name: name.into(),
            e_th,
            g,
            reservoir: Reservoir::Parabolic(profile),
            coefficients: Some((delta, lambda)),
        })
    }

    /// Constant coupling and constant coefficients, no reservoir integral
    /// behind `Delta` (use [`Self::flat`] for the physical `v = 1` band).
    pub fn constant(e_th: T, g: T, delta: T, lambda: T) -> Result<Self> {
        Self::new(
            "const",
            e_th,
            g,
            Arc::new(move |_| re(delta)),
            Arc::new(move |_| re(lambda)),
            Profile::Constant(T::one()),
        )
    }

    /// `v(k) = 1`: `Sigma = -pi g^2 / sqrt(E_th - E)`, so `Delta = 0`, `Lambda = -pi`.
    pub fn flat(e_th: T, g: T) -> Result<Self> {
        let pi = T::PI();
        Self::new("const", e_th, g, Arc::new(|_| re(T::zero())), Arc::new(move |_| re(-pi)), Profile::Constant(T::one()))
    }

    /// `v(k) = 1/(1 + k^2)`, with `Delta`, `Lambda` read off the closed form.
    pub fn lorentzian(e_th: T, g: T) -> Result<Self> {
        let pi = T::PI();
        let delta = Arc::new(move |e: Cplx<T>| {
            let am1 = re(e_th) - e - T::one();
            -(re(pi) / (am1 * T::lit(2.0)) - re(pi) / (am1 * am1))
        });
        let lambda = Arc::new(move |e: Cplx<T>| {
            let om = re(T::one()) - (re(e_th) - e);
            -re(pi) / (om * om)
        });
        Self::new("lorentzian", e_th, g, delta, lambda, Profile::Lorentzian)
    }

    /// The chain of the main model: `E_th = -2`, `Sigma = -g^2/sqrt(E^2 - 4)`
    /// below the band, i.e. `Delta = 0`, `Lambda = -1/sqrt(2 - E)`.
    pub fn main_text(g: T) -> Result<Self> {
        check_g(g)?;
        let two = T::lit(2.0);
        Ok(Self {
            name: "main-text".into(),
            e_th: -two,
            g,
            reservoir: Reservoir::TightBinding,
            coefficients: Some((
                Arc::new(|_| re(T::zero())),
                Arc::new(move |e: Cplx<T>| -(re(two) - e).sqrt().inv()),
            )),
        })
    }

    /// Counterexample: `v(k) = |k|^(-1/4)` has no square-root threshold form.
    pub fn singular(e_th: T, g: T) -> Result<Self> {
        check_g(g)?;
        Ok(Self {
            name: "singular".into(),
            e_th,
            g,
            reservoir: Reservoir::Parabolic(Profile::InverseQuarterRoot),
            coefficients: None,
        })
    }

    /// Built-in model by CLI name: `const`, `lorentzian` or `main-text`.
    pub fn by_name(name: &str, g: T) -> Result<Self> {
        match name {
            "const" => Self::flat(T::zero(), g),
            "lorentzian" => Self::lorentzian(T::zero(), g),
            "main-text" => Self::main_text(g),
            "singular" => Self::singular(T::zero(), g),
            other => Err(Error::InvalidInput(format!("unknown generic model '{other}'"))),
        }
    }

    pub fn with_g(&self, g: T) -> Self {
        Self { g, ..self.clone() }
    }

    fn coeffs(&self) -> Result<&(Coefficient<T>, Coefficient<T>)> {
        self.coefficients
            .as_ref()
            .ok_or_else(|| Error::NoSquareRootLimit(format!("model '{}' has no threshold coefficients", self.name)))
    }

    /// `(Delta(E), Lambda(E))`.
    pub fn delta_lambda(&self, e: Cplx<T>) -> Result<(Cplx<T>, Cplx<T>)> {
        let (d, l) = self.coeffs()?;
        Ok((d(e), l(e)))
    }
}

fn check_g<T: Real>(g: T) -> Result<()> {
    if !(g >= T::zero()) || !g.is_finite() {
        return Err(Error::CouplingOutOfRange(g.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

fn below_threshold<T: Real>(model: &GenericSelfEnergyModel<T>, e: T) -> Result<T> {
    let a = model.e_th - e;
    if !(a > T::zero()) {
        return Err(Error::Domain(format!("energy must lie below the threshold E_th = {}", model.e_th)));
    }
    Ok(a)
}

/// `Sigma(E)` for real `E < E_th` by quadrature to absolute tolerance
/// `abs_tol`. On the parabolic band the map `k = sqrt(a) tan u`,
/// `a = E_th - E`, turns the integral into `-g^2/sqrt(a) int |v|^2 du` over
/// `(-pi/2, pi/2)`, split at `u = 0` so edge singularities sit on panel ends.
pub fn self_energy_quadrature_tol<T: Real>(model: &GenericSelfEnergyModel<T>, e: T, abs_tol: T) -> Result<T> {
    let a = below_threshold(model, e)?;
    let g2 = model.g * model.g;
    match &model.reservoir {
        Reservoir::Parabolic(profile) => {
            let sa = a.sqrt();
            let f = |u: T| {
                let v = profile.value(sa * u.tan());
                v * v
            };
            let half = T::FRAC_PI_2();
            let scale = g2 / sa;
            let tol = if scale > T::zero() { abs_tol / scale / T::lit(2.0) } else { abs_tol };
            let lo = integrate(f, -half, T::zero(), tol)?;
            let hi = integrate(f, T::zero(), half, tol)?;
            Ok(-scale * (lo + hi))
        }
        Reservoir::TightBinding => {
            let tol = if g2 > T::zero() { abs_tol / g2 } else { abs_tol };
            let pi = T::PI();
            let v = integrate(|k: T| T::one() / (e + T::lit(2.0) * k.cos()), T::zero(), pi, tol)?;
            Ok(g2 * v / pi)
        }
    }
}

/// [`self_energy_quadrature_tol`] at absolute tolerance `1e-8`.
pub fn self_energy_quadrature<T: Real>(model: &GenericSelfEnergyModel<T>, e: T) -> Result<T> {
    self_energy_quadrature_tol(model, e, T::tol(1e-8, 64.0))
}

/// Closed-form `Sigma(E)` for the built-in reservoirs; `None` for custom
/// profiles.
pub fn self_energy_closed_form<T: Real>(model: &GenericSelfEnergyModel<T>, e: T) -> Result<Option<T>> {
    let a = below_threshold(model, e)?;
    let g2 = model.g * model.g;
    let pi = T::PI();
    Ok(match &model.reservoir {
        Reservoir::Parabolic(Profile::Constant(v)) => Some(-pi * g2 * *v * *v / a.sqrt()),
        Reservoir::Parabolic(Profile::Lorentzian) => Some(-g2 * lorentzian_integral(a)),
        Reservoir::Parabolic(Profile::InverseQuarterRoot) => Some(-g2 * pi * T::SQRT_2() * a.powf(T::lit(-0.75))),
        Reservoir::Parabolic(Profile::Custom(_)) => None,
        Reservoir::TightBinding => Some(-g2 / (e * e - T::lit(4.0)).sqrt()),
    })
}

/// `int dk / ((1 + k^2)^2 (a + k^2))` over the real line. The partial
/// fractions `pi/(sqrt(a)(1-a)^2) + pi/(2(a-1)) - pi/(a-1)^2` cancel at
/// `a = 1`; with `s = sqrt(a)` they collapse to `pi (s + 2) / (2 s (s + 1)^2)`.
fn lorentzian_integral<T: Real>(a: T) -> T {
    let s = a.sqrt();
    T::PI() * (s + T::lit(2.0)) / (T::lit(2.0) * s * (s + T::one()) * (s + T::one()))
}

/// One row of a self-energy scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaRow<T> {
    pub energy: T,
    pub quadrature: T,
    pub closed_form: Option<T>,
}

impl<T: Real> SigmaRow<T> {
    pub fn abs_err(&self) -> Option<T> {
        self.closed_form.map(|c| (c - self.quadrature).abs())
    }
}

/// `n` evenly spaced energies from `e_min` to `e_max`, evaluated in parallel.
pub fn self_energy_scan<T: Real>(model: &GenericSelfEnergyModel<T>, e_min: T, e_max: T, n: usize) -> Result<Vec<SigmaRow<T>>> {
    if n == 0 || !(e_max >= e_min) {
        return Err(Error::InvalidInput("scan needs n >= 1 and e_max >= e_min".into()));
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let e = if n == 1 { e_min } else { e_min + (e_max - e_min) * T::from_count(i) / T::from_count(n - 1) };
            Ok(SigmaRow {
                energy: e,
                quadrature: self_energy_quadrature(model, e)?,
                closed_form: self_energy_closed_form(model, e)?,
            })
        })
        .collect()
}

/// Checks that `Sigma(E) sqrt(E_th - E)` settles to a finite limit as
/// `E -> E_th` and returns that limit (which is `-pi g^2 |v(0)|^2` on the
/// parabolic band). Singular profiles fail with `NoSquareRootLimit`.
pub fn square_root_limit_check<T: Real>(model: &GenericSelfEnergyModel<T>) -> Result<T> {
    let distances = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let mut samples = Vec::with_capacity(distances.len());
    for d in distances {
        let a = T::lit(d);
        let sigma = self_energy_quadrature_tol(model, model.e_th - a, T::tol(1e-10, 64.0))?;
        samples.push(sigma * a.sqrt());
    }
    let last = samples[samples.len() - 1];
    let prev = samples[samples.len() - 2];
    let drift = (last - prev).abs() / last.abs().max(T::min_positive_value());
    if !last.is_finite() || drift > T::lit(1e-2) {
        return Err(Error::NoSquareRootLimit(format!(
            "Sigma sqrt(E_th - E) changes by {:.3e} (relative) between distances 1e-5 and 1e-6",
            drift.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(last)
}

/// Roots of the threshold cubic mapped to energies.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRoots<T> {
    /// `x = sqrt(E_th - E)` for each root.
    pub x: [Cplx<T>; 3],
    pub energies: [Cplx<T>; 3],
    /// Whether `Delta`, `Lambda` were re-evaluated at the roots.
    pub refined: bool,
    /// Set when refinement was requested but did not converge; the
    /// frozen-coefficient roots are returned instead.
    pub warning: Option<String>,
}

fn cubic_roots<T: Real>(p: Cplx<T>, q: Cplx<T>) -> Result<[Cplx<T>; 3]> {
    let zero = c(T::zero(), T::zero());
    if q.norm() == T::zero() && p.norm() == T::zero() {
        return Ok([zero; 3]);
    }
    let poly = Polynomial::new(vec![q, p, zero, re(T::one())]);
    let r = poly.roots(T::tol(1e-12, 64.0))?;
    let mut out = [zero; 3];
    out.copy_from_slice(&r[..3]);
    // Real root first, then by imaginary part.
    out.sort_by(|a, b| {
        let ka = (a.im.abs() > T::lit(1e-12) * (T::one() + a.norm()), a.im);
        let kb = (b.im.abs() > T::lit(1e-12) * (T::one() + b.norm()), b.im);
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// Roots with `Delta`, `Lambda` frozen at `E_th`.
pub fn threshold_roots<T: Real>(model: &GenericSelfEnergyModel<T>) -> Result<ThresholdRoots<T>> {
    let (d, l) = model.delta_lambda(re(model.e_th))?;
    let g2 = model.g * model.g;
    let x = cubic_roots(d * g2, l * g2)?;
    let energies = x.map(|x| re(model.e_th) - x * x);
    Ok(ThresholdRoots { x, energies, refined: false, warning: None })
}

/// Starts from [`threshold_roots`] and iterates each root to a fixed point of
/// `x^3 + g^2 Delta(E) x + g^2 Lambda(E) = 0`, `E = E_th - x^2`, to `1e-10`.
pub fn threshold_roots_refined<T: Real>(model: &GenericSelfEnergyModel<T>, max_iter: usize) -> Result<ThresholdRoots<T>> {
    let frozen = threshold_roots(model)?;
    let g2 = model.g * model.g;
    let tol = T::tol(1e-10, 64.0);
    let mut x = frozen.x;
    for xj in x.iter_mut() {
        let mut converged = false;
        for _ in 0..max_iter {
            let e = re(model.e_th) - *xj * *xj;
            let (d, l) = model.delta_lambda(e)?;
            let cand = cubic_roots(d * g2, l * g2)?;
            let next = *cand
                .iter()
                .min_by(|a, b| (**a - *xj).norm().partial_cmp(&(**b - *xj).norm()).unwrap_or(std::cmp::Ordering::Equal))
                .expect("three roots");
            let step = (re(model.e_th) - next * next - e).norm();
            *xj = next;
            if step <= tol * (T::one() + e.norm()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Ok(ThresholdRoots {
                warning: Some(format!("fixed point not reached in {max_iter} iterations; frozen roots returned")),
                ..frozen
            });
        }
    }
    let energies = x.map(|x| re(model.e_th) - x * x);
    Ok(ThresholdRoots { x, energies, refined: true, warning: None })
}

/// Residual of the cubic in `w = E - E_th` obtained by eliminating the
/// square root: `w^3 - 2 g^2 Delta w^2 + g^4 Delta^2 w + g^4 Lambda^2`, with
/// the coefficients frozen at `E_th`.
pub fn energy_cubic_residual<T: Real>(model: &GenericSelfEnergyModel<T>, e: Cplx<T>) -> Result<Cplx<T>> {
    let (d, l) = model.delta_lambda(re(model.e_th))?;
    let g2 = model.g * model.g;
    let w = e - model.e_th;
    Ok(w * w * w - d * w * w * (g2 * T::lit(2.0)) + d * d * w * (g2 * g2) + l * l * (g2 * g2))
}

/// Leading-order root `E = E_th - (g^2 Lambda(E_th))^(2/3)`, from
/// `sqrt(E_th - E) = -(g^2 Lambda)^(1/3)` with the real cube root.
pub fn leading_root_approx<T: Real>(model: &GenericSelfEnergyModel<T>) -> Result<Cplx<T>> {
    let (_, l) = model.delta_lambda(re(model.e_th))?;
    if l.norm() == T::zero() {
        return Err(Error::NoAnomalousPoint);
    }
    let x = -(model.g * model.g * l.re).cbrt();
    Ok(re(model.e_th - x * x))
}

/// Cardano intermediates of `x^3 + p x + q = 0`, `p = g^2 Delta`, `q = g^2 Lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiIntermediates<T> {
    pub xi_plus: Cplx<T>,
    pub xi_minus: Cplx<T>,
    /// `xi_plus^(1/3) + xi_minus^(1/3)` on the branch nearest `-(g^2 Lambda)^(1/3)`.
    pub x: Cplx<T>,
    pub residual: T,
}

/// `xi_(+/-) = (-q +/- q sqrt(1 + 4 p^3 / (27 q^2))) / 2` and the root built
/// from their cube roots. Branches are tied by `c_+ c_- = -p/3`; of the three
/// admissible pairs the one closest to the leading-order root is kept.
pub fn xi_intermediates<T: Real>(model: &GenericSelfEnergyModel<T>, g: T) -> Result<XiIntermediates<T>> {
    let (d, l) = model.delta_lambda(re(model.e_th))?;
    if l.norm() == T::zero() {
        return Err(Error::NoAnomalousPoint);
    }
    let g2 = g * g;
    let (p, q) = (d * g2, l * g2);
    let one = re(T::one());
    let root = (one + p * p * p * T::lit(4.0) / (q * q * T::lit(27.0))).sqrt();
    let xi_plus = (-q + q * root) / T::lit(2.0);
    let xi_minus = (-q - q * root) / T::lit(2.0);
    let target = re(-(g2 * l.re).cbrt());
    let omega = crate::scalar::cis(T::lit(2.0) * T::PI() / T::lit(3.0));
    let base = xi_minus.powf(T::one() / T::lit(3.0));
    let mut best: Option<(Cplx<T>, T)> = None;
    let mut best_res = T::infinity();
    for k in 0..3 {
        let cm = base * omega.powi(k);
        let cp = if cm.norm() > T::zero() { -p / (cm * T::lit(3.0)) } else { xi_plus.powf(T::one() / T::lit(3.0)) };
        let x = cp + cm;
        let residual = (x * x * x + p * x + q).norm();
        best_res = best_res.min(residual);
        let dist = (x - target).norm();
        let scale = T::one().max(q.norm());
        if residual < T::tol(1e-10, 256.0) * scale && best.is_none_or(|(bx, _)| dist < (bx - target).norm()) {
            best = Some((x, residual));
        }
    }
    let (x, residual) = best.ok_or(Error::CubeRootBranch(best_res.to_f64().unwrap_or(f64::NAN)))?;
    Ok(XiIntermediates { xi_plus, xi_minus, x, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::{log_space, loglog_slope};

    #[test]
    fn flat_band_standard_integral() {
        let m = GenericSelfEnergyModel::flat(0.0, 1.0).unwrap();
        assert!((self_energy_quadrature(&m, -1.0).unwrap() + std::f64::consts::PI).abs() < 1e-8);
        assert!(self_energy_quadrature(&m, 0.5).is_err());
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for m in [
            GenericSelfEnergyModel::flat(1.0, 0.7).unwrap(),
            GenericSelfEnergyModel::lorentzian(1.0, 0.7).unwrap(),
            GenericSelfEnergyModel::main_text(0.7).unwrap(),
        ] {
            for k in 0..30 {
                let e = m.e_th - 0.01 - 3.99 * k as f64 / 29.0;
                let q = self_energy_quadrature(&m, e).unwrap();
                let cf = self_energy_closed_form(&m, e).unwrap().unwrap();
                assert!((q - cf).abs() < 1e-8, "{} at {e}: {q} vs {cf}", m.name);
            }
        }
        // Around a = 1 the partial fractions of the closed form cancel.
        let m = GenericSelfEnergyModel::lorentzian(0.0_f64, 1.0).unwrap();
        for a in [1.0_f64 - 2e-3, 1.0 - 5e-4, 1.0, 1.0 + 5e-4, 1.0 + 2e-3] {
            let q = self_energy_quadrature_tol(&m, -a, 1e-12).unwrap();
            assert!((q - self_energy_closed_form(&m, -a).unwrap().unwrap()).abs() < 1e-11);
        }
    }

    #[test]
    fn lorentzian_against_second_quadrature() {
        // k = s / (1 - s) on [0, 1), independent of the tan map.
        let m = GenericSelfEnergyModel::lorentzian(0.0, 1.0).unwrap();
        let a = 0.3;
        let direct = integrate(
            |s: f64| {
                let k = s / (1.0 - s);
                let v = 1.0 / (1.0 + k * k);
                2.0 * v * v / (-a - k * k) / ((1.0 - s) * (1.0 - s))
            },
            0.0,
            1.0,
            1e-13,
        )
        .unwrap();
        assert!((self_energy_quadrature_tol(&m, -a, 1e-12).unwrap() - direct).abs() < 1e-11);
    }

    #[test]
    fn coefficients_reassemble_sigma() {
        for m in [GenericSelfEnergyModel::lorentzian(0.0_f64, 0.5).unwrap(), GenericSelfEnergyModel::main_text(0.5).unwrap()] {
            for a in [0.05_f64, 0.4, 1.7] {
                let e = m.e_th - a;
                let (d, l) = m.delta_lambda(re(e)).unwrap();
                let sigma = (d + l / a.sqrt()) * 0.25;
                assert!((sigma.re - self_energy_closed_form(&m, e).unwrap().unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn square_root_limit() {
        let m = GenericSelfEnergyModel::lorentzian(0.0, 0.3).unwrap();
        let lim = square_root_limit_check(&m).unwrap();
        assert!((lim + std::f64::consts::PI * 0.09).abs() < 2e-3 * 0.09 * 3.2);
        let s = GenericSelfEnergyModel::singular(0.0, 0.3).unwrap();
        assert!(matches!(square_root_limit_check(&s), Err(Error::NoSquareRootLimit(_))));
        assert!(threshold_roots(&s).is_err());
        assert!(GenericSelfEnergyModel::new(
            "bad",
            0.0,
            0.1,
            Arc::new(|_| re(0.0)),
            Arc::new(|_| re(1.0)),
            Profile::InverseQuarterRoot
        )
        .is_err());
    }

    #[test]
    fn pure_cubic_roots() {
        let g: f64 = 0.1;
        let m = GenericSelfEnergyModel::constant(0.0, g, 0.0, 1.0).unwrap();
        let r = threshold_roots(&m).unwrap();
        assert!((r.x[0] + g.powf(2.0 / 3.0)).norm() < 1e-13);
        assert!((r.energies[0] + g.powf(4.0 / 3.0)).norm() < 1e-13);
        for e in r.energies {
            assert!((e * e * e + g.powi(4)).norm() < 1e-15);
        }
        assert!((leading_root_approx(&m).unwrap().re + 0.01_f64.powf(2.0 / 3.0)).abs() < 1e-15);
        assert_eq!(leading_root_approx(&m.with_g(0.0)).unwrap().re, 0.0);
        let z = GenericSelfEnergyModel::constant(0.0, g, 1.0, 0.0).unwrap();
        assert!(matches!(leading_root_approx(&z), Err(Error::NoAnomalousPoint)));
    }

    #[test]
    fn main_text_reproduces_leading_term() {
        let g: f64 = 1e-3;
        let m = GenericSelfEnergyModel::main_text(g).unwrap();
        let e = threshold_roots(&m).unwrap().energies[0];
        let lead = -2.0 - g.powf(4.0 / 3.0) / 2f64.powf(2.0 / 3.0);
        assert!((e.re - lead).abs() < 1e-12 && e.im.abs() < 1e-15);
    }

    #[test]
    fn convergence_exponent_with_delta() {
        let m = GenericSelfEnergyModel::constant(0.0, 1.0, 1.0, 1.0).unwrap();
        let gs = log_space(1e-4, 1e-2, 9);
        for j in 0..3 {
            let ys: Vec<f64> = gs.iter().map(|&g| threshold_roots(&m.with_g(g)).unwrap().energies[j].norm()).collect();
            let slope = loglog_slope(&gs, &ys).unwrap();
            assert!((slope - 4.0 / 3.0).abs() < 0.01, "root {j}: {slope}");
        }
        let r = threshold_roots(&m.with_g(0.01)).unwrap();
        let approx = leading_root_approx(&m.with_g(0.01)).unwrap();
        assert!((approx - r.energies[0]).norm() / r.energies[0].norm() < 0.05);
        for e in r.energies {
            assert!(energy_cubic_residual(&m.with_g(0.01), e).unwrap().norm() < 1e-9 * 1e-8);
        }
    }

    #[test]
    fn refinement_converges() {
        let m = GenericSelfEnergyModel::lorentzian(0.0, 0.05).unwrap();
        let r = threshold_roots_refined(&m, 100).unwrap();
        assert!(r.refined && r.warning.is_none());
        for (x, e) in r.x.iter().zip(r.energies) {
            let (d, l) = m.delta_lambda(e).unwrap();
            assert!((x * x * x + d * 0.0025 * x + l * 0.0025).norm() < 1e-9);
        }
        let stuck = threshold_roots_refined(&m, 0).unwrap();
        assert!(stuck.warning.is_some() && !stuck.refined);
    }

    #[test]
    fn xi_intermediates_cases() {
        let m0 = GenericSelfEnergyModel::constant(0.0, 0.1, 0.0, 1.0).unwrap();
        let xi = xi_intermediates(&m0, 0.1).unwrap();
        assert!(xi.xi_plus.norm() < 1e-18 && (xi.xi_minus + 0.01).norm() < 1e-15);
        assert!((xi.x.re + 0.01_f64.cbrt()).abs() < 1e-14);
        let m1 = GenericSelfEnergyModel::constant(0.0, 0.1, 1.0, 1.0).unwrap();
        let xi = xi_intermediates(&m1, 0.1).unwrap();
        assert!(xi.residual < 1e-10);
        // Negative radicand for Delta < 0 and larger g.
        let m2 = GenericSelfEnergyModel::constant(0.0, 1.0, -3.0, 0.5).unwrap();
        assert!(xi_intermediates(&m2, 1.0).unwrap().residual < 1e-10);
        let gs = log_space(1e-4, 1e-2, 7);
        let ratio: Vec<f64> = gs.iter().map(|&g| {
            let xi = xi_intermediates(&m1, g).unwrap();
            (xi.xi_plus / xi.xi_minus).norm()
        }).collect();
        assert!((loglog_slope(&gs, &ratio).unwrap() - 2.0).abs() < 1e-3);
        assert!((ratio[0] / (1e-8 / 27.0) - 1.0).abs() < 1e-3);
    }
}
