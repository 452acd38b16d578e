//! Complex polynomial roots by companion-matrix eigenvalues with Newton
//! polish, plus the small dense eigenvalue solver behind it.
//!
//! Eigenvalues come from a shifted QR iteration on an upper Hessenberg
//! matrix (companion matrices are Hessenberg already; general matrices are
//! reduced first with Givens rotations). Each root is then polished by Newton
//! steps whose residual is evaluated in double-word arithmetic, which restores
//! the digits lost near clustered roots.

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};
use crate::twofold::horner_twofold;

/// Polynomial with complex coefficients stored in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<Cplx<T>>,
}

impl<T: Real> Polynomial<T> {
    /// Builds from ascending coefficients; trailing zero leading terms are trimmed.
    pub fn new(mut coeffs: Vec<Cplx<T>>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm_sqr() == T::zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[T]) -> Self {
        Self::new(coeffs.iter().map(|&x| Cplx::new(x, T::zero())).collect())
    }

    pub fn coeffs(&self) -> &[Cplx<T>] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Cplx<T>) -> Cplx<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Cplx::new(T::zero(), T::zero()), |acc, &a| acc * z + a)
    }

    /// Residual evaluated in double-word arithmetic.
    pub fn eval_accurate(&self, z: Cplx<T>) -> Cplx<T> {
        horner_twofold(&self.coeffs, z)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::new(vec![Cplx::new(T::zero(), T::zero())]);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| a * T::from_count(k))
                .collect(),
        )
    }

    /// `sum |a_k| |z|^k`, the natural scale of a residual at `z`.
    pub fn magnitude_at(&self, z: Cplx<T>) -> T {
        let r = z.norm();
        self.coeffs.iter().rev().fold(T::zero(), |acc, a| acc * r + a.norm())
    }

    /// All roots, polished; fails if any polished residual stays above
    /// `rel_tol * magnitude_at(root)`.
    pub fn roots(&self, rel_tol: T) -> Result<Vec<Cplx<T>>> {
        let n = self.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        let lead = self.coeffs[n];
        let mut companion = vec![vec![Cplx::new(T::zero(), T::zero()); n]; n];
        for j in 0..n {
            companion[0][j] = -self.coeffs[n - 1 - j] / lead;
        }
        for i in 1..n {
            companion[i][i - 1] = Cplx::new(T::one(), T::zero());
        }
        let raw = hessenberg_qr_eigenvalues(companion)?;
        let dp = self.derivative();
        let mut out = Vec::with_capacity(n);
        for z0 in raw {
            let z = self.polish(&dp, z0);
            let res = self.eval_accurate(z).norm();
            let tol = rel_tol * self.magnitude_at(z).max(T::one());
            if !(res <= tol) {
                return Err(Error::RootPolish {
                    residual: res.to_f64().unwrap_or(f64::NAN),
                    tolerance: tol.to_f64().unwrap_or(f64::NAN),
                });
            }
            out.push(z);
        }
        Ok(out)
    }

    /// Newton iteration with an accurate residual; stops once the residual
    /// no longer decreases or the step drops below roundoff.
    pub fn polish(&self, dp: &Self, mut z: Cplx<T>) -> Cplx<T> {
        let eps = T::epsilon();
        let mut res = self.eval_accurate(z);
        for _ in 0..100 {
            let d = dp.eval(z);
            if d.norm_sqr() == T::zero() || res.norm_sqr() == T::zero() {
                break;
            }
            let step = res / d;
            let cand = z - step;
            let cand_res = self.eval_accurate(cand);
            if !(cand_res.norm() < res.norm()) {
                break;
            }
            z = cand;
            res = cand_res;
            if step.norm() <= eps * T::lit(2.0) * z.norm().max(T::min_positive_value()) {
                break;
            }
        }
        z
    }
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` with real `c`,
/// chosen so that `G [a; b] = [r; 0]`.
#[inline]
fn givens<T: Real>(a: Cplx<T>, b: Cplx<T>) -> (T, Cplx<T>) {
    let an = a.norm();
    let bn = b.norm();
    if bn == T::zero() {
        return (T::one(), Cplx::new(T::zero(), T::zero()));
    }
    if an == T::zero() {
        return (T::zero(), Cplx::new(T::one(), T::zero()));
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Reduces a dense square matrix to upper Hessenberg form by Givens
/// similarity transforms (eigenvalues preserved).
pub fn to_hessenberg<T: Real>(mut h: Vec<Vec<Cplx<T>>>) -> Vec<Vec<Cplx<T>>> {
    let n = h.len();
    for col in 0..n.saturating_sub(2) {
        for row in (col + 2)..n {
            let a = h[col + 1][col];
            let b = h[row][col];
            if b.norm_sqr() == T::zero() {
                continue;
            }
            let (c, s) = givens(a, b);
            rotate_rows(&mut h, col + 1, row, c, s, 0, n);
            rotate_cols(&mut h, col + 1, row, c, s, 0, n);
            h[row][col] = Cplx::new(T::zero(), T::zero());
        }
    }
    h
}

#[inline]
fn rotate_rows<T: Real>(h: &mut [Vec<Cplx<T>>], p: usize, q: usize, c: T, s: Cplx<T>, lo: usize, hi: usize) {
    for j in lo..hi {
        let x = h[p][j];
        let y = h[q][j];
        h[p][j] = x * c + s * y;
        h[q][j] = -s.conj() * x + y * c;
    }
}

#[inline]
fn rotate_cols<T: Real>(h: &mut [Vec<Cplx<T>>], p: usize, q: usize, c: T, s: Cplx<T>, lo: usize, hi: usize) {
    // Right-multiplication by G^H.
    for row in h.iter_mut().take(hi).skip(lo) {
        let x = row[p];
        let y = row[q];
        row[p] = x * c + y * s.conj();
        row[q] = -x * s + y * c;
    }
}

/// Eigenvalues of an upper Hessenberg complex matrix by single-shift QR
/// with Wilkinson shifts and deflation.
pub fn hessenberg_qr_eigenvalues<T: Real>(mut h: Vec<Vec<Cplx<T>>>) -> Result<Vec<Cplx<T>>> {
    let n = h.len();
    let zero = Cplx::new(T::zero(), T::zero());
    let eps = T::epsilon();
    let norm = h
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |acc, z| acc.max(z.norm()))
        .max(T::min_positive_value());
    let mut eig = vec![zero; n];
    if n == 0 {
        return Ok(eig);
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let max_iter = 100 * n.max(1);
    loop {
        if hi == 0 {
            eig[0] = h[0][0];
            break;
        }
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let scale = h[lo][lo].norm() + h[lo - 1][lo - 1].norm();
            let scale = if scale == T::zero() { norm } else { scale };
            if h[lo][lo - 1].norm() <= eps * scale {
                h[lo][lo - 1] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[hi][hi];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > max_iter {
            return Err(Error::EigenNoConvergence(max_iter));
        }
        let mu = if iter % 11 == 10 {
            // Exceptional shift to break cycles.
            h[hi][hi] + Cplx::new(h[hi][hi - 1].norm() * T::lit(0.75), h[hi][hi - 1].norm() * T::lit(0.3))
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };
        for k in lo..=hi {
            h[k][k] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            rotate_rows(&mut h, k, k + 1, c, s, k, hi + 1);
            h[k + 1][k] = zero;
            rots.push((k, c, s));
        }
        for (k, c, s) in rots {
            rotate_cols(&mut h, k, k + 1, c, s, lo, (k + 2).min(hi + 1));
        }
        for k in lo..=hi {
            h[k][k] += mu;
        }
    }
    Ok(eig)
}

fn wilkinson_shift<T: Real>(a: Cplx<T>, b: Cplx<T>, c: Cplx<T>, d: Cplx<T>) -> Cplx<T> {
    let two = T::lit(2.0);
    let tr_half = (a + d) / two;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues of a general dense complex matrix.
pub fn eigenvalues<T: Real>(m: Vec<Vec<Cplx<T>>>) -> Result<Vec<Cplx<T>>> {
    hessenberg_qr_eigenvalues(to_hessenberg(m))
}

/// Pairs two root multisets greedily by nearest distance and returns the
/// largest matched distance.
pub fn multiset_distance<T: Real>(a: &[Cplx<T>], b: &[Cplx<T>]) -> T {
    let mut used = vec![false; b.len()];
    let mut worst = T::zero();
    for &x in a {
        let mut best = None::<(usize, T)>;
        for (j, &y) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (x - y).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, d)) => {
                used[j] = true;
                worst = worst.max(d);
            }
            None => return T::infinity(),
        }
    }
    if a.len() != b.len() {
        return T::infinity();
    }
    worst
}
