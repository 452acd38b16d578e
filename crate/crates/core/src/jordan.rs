//! The 4x4 linear pencil behind the `lambda` quartic, its exact Jordan
//! structure at the threshold point `g = 0, epsilon_d = -2`, and the finite-`g`
//! combinations of eigenvectors that converge to the generalized eigenvectors.

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::model::ModelParams;
use crate::poly;
use crate::scalar::{c, re, Cplx, Real};
use crate::spectrum::threshold_triplet;

pub type Rational = Ratio<i64>;
pub type ExactMatrix = [[Rational; 4]; 4];
pub type ExactVector = [Rational; 4];

/// Builds an exact matrix from integer entries.
pub fn exact(m: [[i64; 4]; 4]) -> ExactMatrix {
    m.map(|row| row.map(Rational::from_integer))
}

pub fn exact_vec(v: [i64; 4]) -> ExactVector {
    v.map(Rational::from_integer)
}

pub fn identity() -> ExactMatrix {
    let mut m = [[Rational::zero(); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn mat_mul(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    let mut out = [[Rational::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).fold(Rational::zero(), |acc, k| acc + a[i][k] * b[k][j]);
        }
    }
    out
}

pub fn mat_vec(a: &ExactMatrix, v: &ExactVector) -> ExactVector {
    let mut out = [Rational::zero(); 4];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..4).fold(Rational::zero(), |acc, k| acc + a[i][k] * v[k]);
    }
    out
}

pub fn mat_sub(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    let mut out = *a;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] -= b[i][j];
        }
    }
    out
}

fn vec_lin(a: &ExactVector, b: &ExactVector, sb: i64) -> ExactVector {
    let mut out = *a;
    for (o, x) in out.iter_mut().zip(b) {
        *o += *x * Rational::from_integer(sb);
    }
    out
}

/// Row echelon reduction; returns the rank.
pub fn rank(m: &ExactMatrix) -> usize {
    let mut a = *m;
    let mut r = 0;
    for col in 0..4 {
        let Some(piv) = (r..4).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        for i in 0..4 {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col] / a[r][col];
                for j in 0..4 {
                    let v = a[r][j];
                    a[i][j] -= f * v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Gauss-Jordan inverse, `None` if singular.
pub fn inverse(m: &ExactMatrix) -> Option<ExactMatrix> {
    let mut a = *m;
    let mut inv = identity();
    for col in 0..4 {
        let piv = (col..4).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..4 {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..4 {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col];
                for j in 0..4 {
                    let (x, y) = (a[col][j], inv[col][j]);
                    a[i][j] -= f * x;
                    inv[i][j] -= f * y;
                }
            }
        }
    }
    Some(inv)
}

/// `(A - lambda B) Psi = 0` with `Psi = (<0|psi>, <d|psi>, lambda<0|psi>, lambda<d|psi>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedPencil<T> {
    pub a: [[T; 4]; 4],
    pub b: [[T; 4]; 4],
}

pub fn build_pencil<T: Real>(params: &ModelParams<T>) -> GeneralizedPencil<T> {
    let (z, o) = (T::zero(), T::one());
    let g = params.g();
    let a = [[z, z, o, z], [z, z, z, o], [o, z, z, -g], [z, o, -g, params.epsilon_d()]];
    let b = [[o, z, z, z], [z, o, z, z], [z, z, o, z], [z, z, z, -o]];
    GeneralizedPencil { a, b }
}

impl<T: Real> GeneralizedPencil<T> {
    /// `det(A - lambda B)`.
    pub fn determinant(&self, lambda: Cplx<T>) -> Cplx<T> {
        let mut m = [[c(T::zero(), T::zero()); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = re(self.a[i][j]) - lambda * self.b[i][j];
            }
        }
        det4(m)
    }

    /// `B^{-1} A` (`B` is its own inverse).
    pub fn reduced(&self) -> [[T; 4]; 4] {
        let mut out = self.a;
        for (i, row) in out.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v *= self.b[i][i];
            }
        }
        out
    }

    /// Eigenvalues of `B^{-1} A`.
    pub fn eigenvalues(&self) -> Result<Vec<Cplx<T>>> {
        let m = self.reduced();
        poly::eigenvalues(m.iter().map(|r| r.iter().map(|&x| re(x)).collect()).collect())
    }
}

fn det4<T: Real>(mut m: [[Cplx<T>; 4]; 4]) -> Cplx<T> {
    let mut det = c(T::one(), T::zero());
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| m[i][col].norm().partial_cmp(&m[j][col].norm()).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty range");
        if m[piv][col].norm_sqr() == T::zero() {
            return c(T::zero(), T::zero());
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for i in (col + 1)..4 {
            let f = m[i][col] / m[col][col];
            for j in col..4 {
                let v = m[col][j];
                m[i][j] -= f * v;
            }
        }
    }
    det
}

/// The exact pencil at `g = 0`, `epsilon_d = -2`.
pub fn threshold_pencil() -> (ExactMatrix, ExactMatrix) {
    let a = exact([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, -2]]);
    let b = exact([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]]);
    (a, b)
}

/// `B^{-1} A` at the threshold point.
pub fn limit_matrix() -> ExactMatrix {
    exact([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 2]])
}

/// Generalized eigenvectors at the threshold point.
pub mod vectors {
    use super::{exact_vec, ExactVector};

    /// Eigenvector for `lambda = -1`.
    pub fn psi_plus() -> ExactVector {
        exact_vec([-1, 0, 1, 0])
    }
    /// Eigenvector for `lambda = 1` heading the Jordan chain.
    pub fn psi_d() -> ExactVector {
        exact_vec([0, 1, 0, 1])
    }
    /// Generalized eigenvector completing the chain under `B^{-1} A`.
    pub fn phi_d() -> ExactVector {
        exact_vec([0, -1, 0, 0])
    }
    /// Generalized eigenvector for the chain under `A^{-1} B`.
    pub fn phi_d_prime() -> ExactVector {
        exact_vec([0, 0, 0, -1])
    }
    /// Second eigenvector for `lambda = 1`.
    pub fn psi_minus() -> ExactVector {
        exact_vec([1, 0, 1, 0])
    }
}

/// Columns `(Psi_+, Psi_d, Phi_d, Psi_-)`.
pub fn similarity_matrix() -> ExactMatrix {
    let cols = [vectors::psi_plus(), vectors::psi_d(), vectors::phi_d(), vectors::psi_minus()];
    let mut r = [[Rational::zero(); 4]; 4];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..4 {
            r[i][j] = col[i];
        }
    }
    r
}

/// `{-1} + [[1, 1], [0, 1]] + {1}`.
pub fn expected_jordan_form() -> ExactMatrix {
    exact([[-1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanReport {
    pub transformed: ExactMatrix,
    pub matches: bool,
    /// `rank(B^{-1}A - I)`.
    pub rank_at_one: usize,
}

/// `R^{-1} (B^{-1} A) R` in exact arithmetic, compared with the expected form.
pub fn verify_jordan_form() -> JordanReport {
    let r = similarity_matrix();
    let r_inv = inverse(&r).expect("similarity matrix is invertible");
    let transformed = mat_mul(&r_inv, &mat_mul(&limit_matrix(), &r));
    JordanReport {
        matches: transformed == expected_jordan_form(),
        transformed,
        rank_at_one: rank(&mat_sub(&limit_matrix(), &identity())),
    }
}

/// Operator in which the chain relations are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainOperator {
    /// `A^{-1} B`, the inverse of the limit matrix.
    AInvB,
    /// `B^{-1} A`, the limit matrix itself.
    BInvA,
}

impl ChainOperator {
    pub fn matrix(self) -> ExactMatrix {
        match self {
            ChainOperator::AInvB => {
                let (a, b) = threshold_pencil();
                mat_mul(&inverse(&a).expect("threshold A is invertible"), &b)
            }
            ChainOperator::BInvA => limit_matrix(),
        }
    }
}

/// Residual vectors of the chain relations, all zero when they hold.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub operator: ChainOperator,
    /// `Op Psi_d - Psi_d`.
    pub eigen: ExactVector,
    /// `Op Phi_d - Phi_d - Psi_d`.
    pub chain: ExactVector,
    /// `Op Phi_d' - Phi_d' + Psi_d`.
    pub chain_prime: ExactVector,
    /// `Phi_d + Phi_d' + Psi_d`.
    pub link: ExactVector,
}

fn is_zero_vec(v: &ExactVector) -> bool {
    v.iter().all(|x| x.is_zero())
}

impl ChainReport {
    /// `(eigen, chain, chain_prime, link)` hold flags.
    pub fn holds(&self) -> [bool; 4] {
        [is_zero_vec(&self.eigen), is_zero_vec(&self.chain), is_zero_vec(&self.chain_prime), is_zero_vec(&self.link)]
    }

    pub fn all_hold(&self) -> bool {
        self.holds().iter().all(|&h| h)
    }
}

/// Chain relations with the operator `A^{-1} B`.
pub fn jordan_chain_check() -> ChainReport {
    jordan_chain_check_with(ChainOperator::AInvB)
}

pub fn jordan_chain_check_with(operator: ChainOperator) -> ChainReport {
    let op = operator.matrix();
    let (psi_d, phi_d, phi_p) = (vectors::psi_d(), vectors::phi_d(), vectors::phi_d_prime());
    ChainReport {
        operator,
        eigen: vec_lin(&mat_vec(&op, &psi_d), &psi_d, -1),
        chain: vec_lin(&vec_lin(&mat_vec(&op, &phi_d), &phi_d, -1), &psi_d, -1),
        chain_prime: vec_lin(&vec_lin(&mat_vec(&op, &phi_p), &phi_p, -1), &psi_d, 1),
        link: vec_lin(&vec_lin(&phi_d, &phi_p, 1), &psi_d, 1),
    }
}

/// The three finite-`g` combinations and their distances to
/// `Psi_d`, `Phi_d'` and `Psi_-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitingCombinations<T> {
    pub combos: [[Cplx<T>; 4]; 3],
    pub residuals: [T; 3],
}

/// Eigenvector `Psi_j / <d|psi_j>` at the threshold, which depends on `lambda` only.
fn scaled_quad_state<T: Real>(g: T, lambda: Cplx<T>) -> [Cplx<T>; 4] {
    let one = re(T::one());
    let ratio = lambda * g / (one - lambda * lambda);
    [ratio, one, lambda * ratio, lambda]
}

pub fn limiting_combinations<T: Real>(g: T) -> Result<LimitingCombinations<T>> {
    let triplet = threshold_triplet(&ModelParams::at_threshold(g)?)?;
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let beta = (g * g / two).cbrt();
    let gamma = (g / T::lit(4.0)).cbrt();
    let zero = c(T::zero(), T::zero());
    let mut combos = [[zero; 4]; 3];
    for (alpha, state) in triplet.with_alpha() {
        let phase = T::lit(2.0) * T::PI() * T::lit(alpha as f64) / three;
        let v = scaled_quad_state(g, state.lambda);
        let w = [
            re(T::one() / three),
            c(phase.cos(), -phase.sin()) / (three * beta),
            c(phase.cos(), phase.sin()) / (three * gamma),
        ];
        for (combo, wk) in combos.iter_mut().zip(w) {
            for (x, vi) in combo.iter_mut().zip(v) {
                *x += wk * vi;
            }
        }
    }
    let targets = [vectors::psi_d(), vectors::phi_d_prime(), vectors::psi_minus()];
    let mut residuals = [T::zero(); 3];
    for k in 0..3 {
        residuals[k] = combos[k]
            .iter()
            .zip(targets[k])
            .fold(T::zero(), |acc, (x, t)| {
                let tv = T::lit(*t.numer() as f64 / *t.denom() as f64);
                acc + (*x - re(tv)).norm_sqr()
            })
            .sqrt();
    }
    Ok(LimitingCombinations { combos, residuals })
}
