//! Ordinary exceptional points of the energy quartic: closed-form
//! coalescence energies, the parameter values that produce them, root-gap
//! certification and complex-`epsilon_d` sheet sweeps.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{c, cis, re, Cplx, Real};
use crate::spectrum::{energy_quartic_complex, solve_lambda_quartic_complex, LambdaRoot};

/// A coalescence point: `p(E; eps_bar, g)` has a double root at `e_bar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpLocation<T> {
    pub n: i32,
    pub e_bar: Cplx<T>,
    pub eps_bar: Cplx<T>,
    pub g: T,
}

/// `(E^2 - 4)^3 - g^4 E^2`.
pub fn ep_condition_residual<T: Real>(energy: Cplx<T>, g: T) -> Cplx<T> {
    let u = energy * energy - re(T::lit(4.0));
    u * u * u - energy * energy * g.powi(4)
}

/// Negative root `E_bar_n` (`n` in `{-1, 0, 1}`) of the coalescence condition.
///
/// With `u = E^2 - 4` the condition is the depressed cubic
/// `u^3 - g^4 u - 4 g^4 = 0`, solved by Cardano with the `n`-th rotation of
/// the two real cube roots.
pub fn ep_energy_closed_form<T: Real>(g: T, n: i32) -> Result<Cplx<T>> {
    if !(-1..=1).contains(&n) {
        return Err(Error::InvalidInput(format!("branch index n = {n} not in {{-1, 0, 1}}")));
    }
    let g4 = g.powi(4);
    if !(g >= T::zero()) || !(g4 < T::lit(108.0)) {
        return Err(Error::CouplingOutOfRange(g.to_f64().unwrap_or(f64::NAN)));
    }
    let a = T::lit(2.0) + (T::lit(36.0) - g4 / T::lit(3.0)).sqrt() / T::lit(3.0);
    // a b = g^4 / 27 avoids cancelling in the small root.
    let b = g4 / T::lit(27.0) / a;
    let g43 = g.powf(T::lit(4.0) / T::lit(3.0));
    let w = cis(T::lit(2.0) * T::PI() * T::lit(n as f64) / T::lit(3.0));
    let u = w * (g43 * a.cbrt()) + w.conj() * (g43 * b.cbrt());
    Ok(-(u + re(T::lit(4.0))).sqrt())
}

/// `p(E)` and `p'(E)` for complex `epsilon_d`.
pub fn double_root_residuals<T: Real>(energy: Cplx<T>, eps: Cplx<T>, g: T) -> (Cplx<T>, Cplx<T>) {
    let p = energy_quartic_complex(eps, g);
    (p.eval(energy), p.derivative().eval(energy))
}

/// Emitter energy `eps_bar_n = E_bar_n - Sigma(E_bar_n)` on the branch of the
/// square root that makes `E_bar_n` a double root.
pub fn ep_parameter<T: Real>(g: T, n: i32) -> Result<EpLocation<T>> {
    let e_bar = ep_energy_closed_form(g, n)?;
    let root = (e_bar * e_bar - re(T::lit(4.0))).sqrt();
    let g2 = g * g;
    let tol = T::tol(1e-8, 1024.0);
    let mut best: Option<(Cplx<T>, T)> = None;
    for sign in [T::one(), -T::one()] {
        let sigma = if root.norm() > T::zero() { re(sign * g2) / root } else { re(T::zero()) };
        let eps = e_bar - sigma;
        let (p, dp) = double_root_residuals(e_bar, eps, g);
        let score = p.norm().max(dp.norm());
        if best.is_none_or(|(_, s)| score < s) {
            best = Some((eps, score));
        }
    }
    let (mut eps_bar, score) = best.expect("two branches tried");
    if !(score < tol) {
        return Err(Error::EpConsistency(score.to_f64().unwrap_or(f64::NAN)));
    }
    if n == 0 {
        eps_bar.im = T::zero();
    }
    Ok(EpLocation { n, e_bar, eps_bar, g })
}

/// Root-gap certificate for a candidate coalescence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpCertificate<T> {
    /// Smallest distance between two energy roots.
    pub min_gap: T,
    /// Distance between the `lambda` values of that pair.
    pub lambda_gap: T,
    /// Both gaps below the certification threshold.
    pub certified: bool,
}

/// Smallest energy gap among the roots at `(eps, g)`, with the matching
/// `lambda` gap. Certified when both are below `1e-6`.
pub fn verify_ep_by_discriminant<T: Real>(g: T, eps: Cplx<T>) -> Result<EpCertificate<T>> {
    let roots = solve_lambda_quartic_complex(eps, g)?;
    let mut best = (T::infinity(), T::infinity());
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            let de = (roots[i].energy - roots[j].energy).norm();
            let dl = (roots[i].lambda - roots[j].lambda).norm();
            if de < best.0 || (de == best.0 && dl < best.1) {
                best = (de, dl);
            }
        }
    }
    let thr = T::tol(1e-6, 4096.0);
    Ok(EpCertificate { min_gap: best.0, lambda_gap: best.1, certified: best.0 < thr && best.1 < thr })
}

/// One tracked eigenvalue on the complex-`epsilon_d` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheetPoint<T> {
    pub eps: Cplx<T>,
    pub branch_id: usize,
    pub energy: Cplx<T>,
    pub lambda: Cplx<T>,
}

/// Rectangular grid over `Re eps` and `Im eps` (inclusive endpoints).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsGrid<T> {
    pub re_min: T,
    pub re_max: T,
    pub n_re: usize,
    pub im_min: T,
    pub im_max: T,
    pub n_im: usize,
}

impl<T: Real> EpsGrid<T> {
    fn axis(lo: T, hi: T, n: usize, i: usize) -> T {
        if n <= 1 {
            lo
        } else {
            lo + (hi - lo) * T::from_count(i) / T::from_count(n - 1)
        }
    }

    pub fn point(&self, i_re: usize, i_im: usize) -> Cplx<T> {
        c(Self::axis(self.re_min, self.re_max, self.n_re, i_re), Self::axis(self.im_min, self.im_max, self.n_im, i_im))
    }
}

fn near_edge_roots<T: Real>(eps: Cplx<T>, g: T) -> Result<Vec<LambdaRoot<T>>> {
    let mut roots = solve_lambda_quartic_complex(eps, g)?;
    roots.sort_by(|a, b| a.energy.re.partial_cmp(&b.energy.re).unwrap_or(std::cmp::Ordering::Equal));
    roots.truncate(3);
    Ok(roots)
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Reorders `next` so that entry `k` continues `prev[k]`: nearest in `E`,
/// ties decided by `lambda`.
fn match_to<T: Real>(prev: &[LambdaRoot<T>], next: &[LambdaRoot<T>]) -> Vec<LambdaRoot<T>> {
    let mut best: Option<([usize; 3], T, T)> = None;
    for p in PERMS {
        let de = (0..3).fold(T::zero(), |a, k| a + (prev[k].energy - next[p[k]].energy).norm());
        let dl = (0..3).fold(T::zero(), |a, k| a + (prev[k].lambda - next[p[k]].lambda).norm());
        let better = match best {
            None => true,
            Some((_, be, bl)) => {
                let tie = (de - be).abs() <= T::lit(1e-12) * (T::one() + be);
                if tie {
                    dl < bl
                } else {
                    de < be
                }
            }
        };
        if better {
            best = Some((p, de, dl));
        }
    }
    let (p, _, _) = best.expect("permutations checked");
    p.iter().map(|&k| next[k]).collect()
}

/// The three near-edge eigenvalues on every grid cell, with branch labels
/// carried continuously along each `Re eps` scan line and, through the first
/// column, from one line to the next. Output is ordered by `Im eps`, then
/// `Re eps`, then branch.
pub fn complex_parameter_sheet<T: Real>(g: T, grid: &EpsGrid<T>) -> Result<Vec<SheetPoint<T>>> {
    if grid.n_re == 0 || grid.n_im == 0 {
        return Err(Error::InvalidInput("grid needs at least one cell per axis".into()));
    }
    let cells: Result<Vec<Vec<LambdaRoot<T>>>> = (0..grid.n_im * grid.n_re)
        .into_par_iter()
        .map(|idx| near_edge_roots(grid.point(idx % grid.n_re, idx / grid.n_re), g))
        .collect();
    let mut cells = cells?;
    let mut out = Vec::with_capacity(cells.len() * 3);
    let mut line_seed: Option<Vec<LambdaRoot<T>>> = None;
    for i_im in 0..grid.n_im {
        let mut prev: Option<Vec<LambdaRoot<T>>> = None;
        for i_re in 0..grid.n_re {
            let idx = i_im * grid.n_re + i_re;
            let raw = std::mem::take(&mut cells[idx]);
            let ordered = match (&prev, i_re, &line_seed) {
                (Some(p), _, _) => match_to(p, &raw),
                (None, 0, Some(seed)) => match_to(seed, &raw),
                _ => raw,
            };
            if i_re == 0 {
                line_seed = Some(ordered.clone());
            }
            let eps = grid.point(i_re, i_im);
            for (branch_id, r) in ordered.iter().enumerate() {
                out.push(SheetPoint { eps, branch_id, energy: r.energy, lambda: r.lambda });
            }
            prev = Some(ordered);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_limit_of_closed_form() {
        for n in -1..=1 {
            let e = ep_energy_closed_form(0.0_f64, n).unwrap();
            assert!((e + 2.0).norm() < 1e-15);
            let e = ep_energy_closed_form(1e-6_f64, n).unwrap();
            assert!((e + 2.0).norm() < 1e-7);
        }
    }

    #[test]
    fn closed_form_satisfies_condition() {
        for n in -1..=1 {
            let e = ep_energy_closed_form(0.3_f64, n).unwrap();
            assert!(ep_condition_residual(e, 0.3).norm() < 1e-12, "n={n}");
            assert!(e.re < 0.0);
        }
        let e0 = ep_energy_closed_form(0.3_f64, 0).unwrap();
        assert_eq!(e0.im, 0.0);
        let ep = ep_energy_closed_form(0.3_f64, 1).unwrap();
        let em = ep_energy_closed_form(0.3_f64, -1).unwrap();
        assert!((ep - em.conj()).norm() < 1e-15);
    }

    #[test]
    fn residual_arithmetic() {
        assert_eq!(ep_condition_residual(Cplx::new(-2.0, 0.0), 0.0), Cplx::new(0.0, 0.0));
        let r = ep_condition_residual(Cplx::new(-2.5, 0.0), 0.1);
        assert!((r.re - (2.25f64.powi(3) - 1e-4 * 6.25)).abs() < 1e-12);
    }

    #[test]
    fn real_ep_parameter() {
        let ep = ep_parameter(0.1_f64, 0).unwrap();
        assert!((ep.eps_bar.re + 2.05518).abs() < 5e-5, "{}", ep.eps_bar);
        assert_eq!(ep.eps_bar.im, 0.0);
        assert!((ep.e_bar.re + 2.018448173042493).abs() < 1e-12);
        assert!((ep.eps_bar.re + 2.055175906877162).abs() < 1e-12);
        assert!(ep_condition_residual(ep.e_bar, 0.1).norm() < 1e-12);
        let (p, dp) = double_root_residuals(ep.e_bar, ep.eps_bar, 0.1);
        assert!(p.norm() < 1e-8 && dp.norm() < 1e-8);
    }

    #[test]
    fn complex_ep_parameters_are_conjugate() {
        let a = ep_parameter(0.1_f64, 1).unwrap();
        let b = ep_parameter(0.1_f64, -1).unwrap();
        assert!((a.eps_bar - b.eps_bar.conj()).norm() < 1e-12);
        assert!(a.eps_bar.im.abs() > 1e-4);
        let small = ep_parameter(1e-5_f64, 1).unwrap();
        assert!((small.eps_bar + 2.0).norm() < 1e-5);
    }

    #[test]
    fn out_of_range_coupling() {
        assert!(matches!(ep_energy_closed_form(4.0_f64, 0), Err(Error::CouplingOutOfRange(_))));
        assert!(ep_energy_closed_form(-0.1_f64, 0).is_err());
    }

    #[test]
    fn discriminant_certification() {
        let ep = ep_parameter(0.1_f64, 0).unwrap();
        let cert = verify_ep_by_discriminant(0.1, ep.eps_bar).unwrap();
        assert!(cert.certified, "{cert:?}");
        let off = verify_ep_by_discriminant(0.1_f64, Cplx::new(-2.0, 0.0)).unwrap();
        let expect = 3f64.sqrt() * 0.1f64.powf(4.0 / 3.0) / 2f64.powf(2.0 / 3.0);
        assert!(!off.certified);
        assert!((off.min_gap - expect).abs() / expect < 0.05, "{}", off.min_gap);
        let triple = verify_ep_by_discriminant(0.0_f64, Cplx::new(-2.0, 0.0)).unwrap();
        assert!(triple.min_gap < 1e-4);
    }

    #[test]
    fn complex_ep_certified() {
        let ep = ep_parameter(0.1_f64, 1).unwrap();
        assert!(verify_ep_by_discriminant(0.1, ep.eps_bar).unwrap().certified);
    }

    #[test]
    fn sheet_real_slice_and_symmetry() {
        let grid = EpsGrid { re_min: -2.15, re_max: -1.85, n_re: 7, im_min: -0.02, im_max: 0.02, n_im: 3 };
        let pts = complex_parameter_sheet(0.1_f64, &grid).unwrap();
        assert_eq!(pts.len(), 7 * 3 * 3);
        let scan = crate::spectrum::spectrum_scan(0.1, -2.15, -1.85, 0.05).unwrap();
        for p in pts.iter().filter(|p| p.eps.im == 0.0) {
            assert!(scan
                .iter()
                .any(|r| (r.epsilon_d - p.eps.re).abs() < 1e-12 && (r.state.energy - p.energy).norm() < 1e-9));
        }
        for p in pts.iter().filter(|p| p.eps.im > 0.0) {
            let mirror = pts.iter().filter(|q| (q.eps - p.eps.conj()).norm() < 1e-12);
            assert!(mirror.into_iter().any(|q| (q.energy - p.energy.conj()).norm() < 1e-9));
        }
    }
}
