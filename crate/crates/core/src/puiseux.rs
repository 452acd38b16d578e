//! Fractional-power expansions of the threshold triplet at `epsilon_d = -2`
//! in the small parameter `s = g^{2/3}`.
//!
//! All three branches come from the bound-state series by the substitution
//! `s -> omega s`, `omega = exp(2 pi i alpha / 3)` with `alpha = 0, -1, +1`
//! for bound, resonance and anti-resonance.

use crate::error::{Error, Result};
use crate::scalar::{c, cis, re, Cplx, Real};

/// Quantity being expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Energy,
    Lambda,
    /// `<d|psi>^2`.
    NormD,
}

/// Which of the three threshold states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Bound,
    Resonance,
    AntiResonance,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::Bound, Branch::Resonance, Branch::AntiResonance];

    /// Phase index `alpha`.
    pub fn alpha(self) -> i32 {
        match self {
            Branch::Bound => 0,
            Branch::Resonance => -1,
            Branch::AntiResonance => 1,
        }
    }

    pub fn omega<T: Real>(self) -> Cplx<T> {
        cis(T::lit(2.0) * T::PI() * T::lit(self.alpha() as f64) / T::lit(3.0))
    }
}

/// Truncated series `sum_k terms[k] s^(k + leading_power)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PuiseuxExpansion<T> {
    pub quantity: Quantity,
    pub branch: Branch,
    /// `(g^2 / 2)^{1/3}`.
    pub beta: T,
    pub alpha: i32,
    pub leading_power: i32,
    pub terms: Vec<Cplx<T>>,
}

impl<T: Real> PuiseuxExpansion<T> {
    /// Full stored series for coupling `g`.
    pub fn new(quantity: Quantity, branch: Branch, g: T) -> Self {
        let w: Cplx<T> = branch.omega();
        let cr2 = T::lit(2.0).cbrt();
        let z = re(T::zero());
        let one = re(T::one());
        let (leading_power, terms) = match quantity {
            Quantity::Energy => (
                0,
                vec![re(-T::lit(2.0)), z, -w * w / (cr2 * cr2), z, w.powi(4) / (T::lit(24.0) * cr2)],
            ),
            Quantity::Lambda => (
                0,
                vec![
                    one,
                    -w / cr2,
                    w * w / (T::lit(2.0) * cr2 * cr2),
                    re(-T::one() / T::lit(24.0)),
                    -w.powi(4) / (T::lit(48.0) * cr2),
                ],
            ),
            Quantity::NormD => (-1, vec![re(cr2 / T::lit(3.0)) / w, one / T::lit(3.0), w / (T::lit(9.0) * cr2)]),
        };
        Self {
            quantity,
            branch,
            beta: (g * g / T::lit(2.0)).cbrt(),
            alpha: branch.alpha(),
            leading_power,
            terms,
        }
    }

    /// Number of nonzero terms stored.
    pub fn max_terms(&self) -> usize {
        self.terms.iter().filter(|t| t.norm_sqr() > T::zero()).count()
    }

    /// Sum of the first `n_terms` nonzero terms at `s = g^{2/3}`.
    pub fn evaluate(&self, g: T, n_terms: usize) -> Result<Cplx<T>> {
        if n_terms == 0 || n_terms > self.max_terms() {
            return Err(Error::InvalidInput(format!("n_terms must be in 1..={}", self.max_terms())));
        }
        let s = g.powf(T::lit(2.0) / T::lit(3.0));
        if self.leading_power < 0 && s == T::zero() {
            return Err(Error::PuiseuxDivergence);
        }
        let mut acc = c(T::zero(), T::zero());
        let mut used = 0;
        for (k, &t) in self.terms.iter().enumerate() {
            if used == n_terms {
                break;
            }
            if t.norm_sqr() == T::zero() {
                continue;
            }
            let power = k as i32 + self.leading_power;
            acc += t * s.powi(power);
            used += 1;
        }
        Ok(acc)
    }
}

/// `E` through `g^{8/3}` (`n_terms` up to 3).
pub fn puiseux_energy<T: Real>(g: T, branch: Branch, n_terms: usize) -> Result<Cplx<T>> {
    PuiseuxExpansion::new(Quantity::Energy, branch, g).evaluate(g, n_terms)
}

/// `lambda` through `g^{8/3}` (`n_terms` up to 5).
pub fn puiseux_lambda<T: Real>(g: T, branch: Branch, n_terms: usize) -> Result<Cplx<T>> {
    PuiseuxExpansion::new(Quantity::Lambda, branch, g).evaluate(g, n_terms)
}

/// `<d|psi>^2` from `g^{-2/3}` through `g^{2/3}` (`n_terms` up to 3).
pub fn puiseux_norm_d<T: Real>(g: T, branch: Branch, n_terms: usize) -> Result<Cplx<T>> {
    PuiseuxExpansion::new(Quantity::NormD, branch, g).evaluate(g, n_terms)
}
