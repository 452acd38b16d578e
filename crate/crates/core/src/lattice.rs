//! Finite-chain reference for the emitter survival amplitude.
//!
//! The emitter couples only to site 0, so it sees the even-parity sector of
//! the truncated chain `-N..N`. In the basis `|d>, |0>, (|x> + |-x>)/sqrt 2`
//! (`x = 1..N`) that sector is an `(N + 2)`-dimensional symmetric tridiagonal
//! matrix with the same `<d|e^{-iHt}|d>` as the full `2N + 2` problem.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::scalar::{Cplx, Real};

/// Truncation of the chain and the longest time it is trusted for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig<T> {
    /// Sites run from `-half_length` to `half_length`.
    pub half_length: usize,
    pub t_max: T,
}

impl<T: Real> LatticeConfig<T> {
    /// Checks the wavefront guard `N > 2 t_max + 10`.
    pub fn new(half_length: usize, t_max: T) -> Result<Self> {
        let required = T::lit(2.0) * t_max + T::lit(10.0);
        if !(T::from_count(half_length) > required) {
            return Err(Error::LatticeTooShort {
                half_length,
                required: required.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { half_length, t_max })
    }

    /// Smallest admissible chain for `t_max`.
    pub fn for_time(t_max: T) -> Result<Self> {
        let n = (T::lit(2.0) * t_max + T::lit(11.0)).ceil().to_usize().ok_or(Error::TimeGrid)?;
        Self::new(n, t_max)
    }
}

/// Eigenvalues of the even sector with their emitter weights `|<d|m>|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpectrum<T> {
    pub energies: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> LatticeSpectrum<T> {
    /// `sum_m w_m exp(-i E_m t)`.
    pub fn amplitude(&self, t: T) -> Cplx<T> {
        let mut re = T::zero();
        let mut im = T::zero();
        for (&e, &w) in self.energies.iter().zip(&self.weights) {
            let (s, c) = (e * t).sin_cos();
            re += w * c;
            im -= w * s;
        }
        Cplx::new(re, im)
    }

    /// `sum_m w_m E_m^k`.
    pub fn moment(&self, k: u32) -> T {
        self.energies.iter().zip(&self.weights).fold(T::zero(), |acc, (&e, &w)| acc + w * e.powi(k as i32))
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, &w| a + w)
    }
}

/// Diagonal and off-diagonal of the even-sector matrix, basis order
/// `d, 0, e_1 .. e_N`.
pub fn even_sector<T: Real>(params: &ModelParams<T>, half_length: usize) -> (Vec<T>, Vec<T>) {
    let n = half_length + 2;
    let mut diag = vec![T::zero(); n];
    diag[0] = params.epsilon_d();
    let mut off = vec![-T::one(); n];
    off[0] = -params.g();
    if n > 2 {
        off[1] = -T::SQRT_2();
    }
    off[n - 1] = T::zero();
    (diag, off)
}

/// Full spectral decomposition of the emitter-projected even sector.
pub fn lattice_spectrum<T: Real>(params: &ModelParams<T>, half_length: usize) -> Result<LatticeSpectrum<T>> {
    let (mut d, mut e) = even_sector(params, half_length);
    let mut z = vec![T::zero(); d.len()];
    z[0] = T::one();
    tridiagonal_ql(&mut d, &mut e, &mut z)?;
    Ok(LatticeSpectrum { energies: d, weights: z.iter().map(|v| *v * *v).collect() })
}

/// Implicit QL with Wilkinson-type shifts for a symmetric tridiagonal
/// matrix. `e[i]` couples `i` and `i + 1`; `z` is one row of the eigenvector
/// matrix (start with a unit vector) and is rotated along.
pub fn tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T], z: &mut [T]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = T::zero();
    let max_iter = 60;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::EigenNoConvergence(max_iter));
            }
            let mut g = (d[l + 1] - d[l]) / (T::lit(2.0) * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r } else { -r });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::lit(2.0) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// `<d|H^k|d>` for `k = 0..=k_max` on the full `2N + 2` site problem,
/// by repeated sparse products. Independent of the parity reduction.
pub fn full_chain_moments<T: Real>(params: &ModelParams<T>, half_length: usize, k_max: u32) -> Vec<T> {
    let n_sites = 2 * half_length + 1;
    // index 0 is the emitter, index 1 + (x + N) the chain site x.
    let dim = n_sites + 1;
    let site0 = 1 + half_length;
    let apply = |v: &[T]| -> Vec<T> {
        let mut out = vec![T::zero(); dim];
        out[0] = params.epsilon_d() * v[0] - params.g() * v[site0];
        out[site0] -= params.g() * v[0];
        for j in 0..n_sites {
            let idx = 1 + j;
            if j > 0 {
                out[idx] -= v[idx - 1];
            }
            if j + 1 < n_sites {
                out[idx] -= v[idx + 1];
            }
        }
        out
    };
    let mut v = vec![T::zero(); dim];
    v[0] = T::one();
    let mut moments = vec![T::one()];
    for _ in 0..k_max {
        v = apply(&v);
        moments.push(v[0]);
    }
    // Those are <d|H^k|d> only through v[0] of H^k |d>.
    moments
}
