//! Survival amplitude `A(t) = <d|exp(-iHt)|d>` of the emitter.
//!
//! Three independent routes: the finite-chain oracle of [`crate::lattice`],
//! the Bessel-integral sum over the three near-edge states, and closed-form
//! intermediate and long-time laws. Helpers extract the Zeno coefficient,
//! the first minimum and the dominant oscillation frequency of a trace.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{FftNum, FftPlanner};

use crate::error::{Error, Result};
use crate::fit;
use crate::lattice::{lattice_spectrum, LatticeConfig};
use crate::model::ModelParams;
use crate::quadrature::integrate;
use crate::scalar::{c, cis, Cplx, Real};
use crate::special::bessel_j01;
use crate::spectrum::{discrete_states, near_lower_edge, DiscreteState, StateClass};

fn ii<T: Real>() -> Cplx<T> {
    c(T::zero(), T::one())
}

/// How a [`SurvivalTrace`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurvivalMethod {
    LatticeOracle,
    BesselSum,
    IntermediateLaw,
    LongTimeLaw,
}

impl SurvivalMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SurvivalMethod::LatticeOracle => "lattice_oracle",
            SurvivalMethod::BesselSum => "bessel_sum",
            SurvivalMethod::IntermediateLaw => "intermediate_law",
            SurvivalMethod::LongTimeLaw => "longtime_law",
        }
    }
}

impl std::fmt::Display for SurvivalMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Amplitude and probability on an ascending time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalTrace<T> {
    pub times: Vec<T>,
    pub amplitude: Vec<Cplx<T>>,
    pub probability: Vec<T>,
    pub method: SurvivalMethod,
}

impl<T: Real> SurvivalTrace<T> {
    pub fn from_amplitudes(times: Vec<T>, amplitude: Vec<Cplx<T>>, method: SurvivalMethod) -> Self {
        let probability = amplitude.iter().map(|a| a.norm_sqr()).collect();
        Self { times, amplitude, probability, method }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max |P_self - P_other|` over a shared grid.
    pub fn max_probability_difference(&self, other: &Self) -> Result<T> {
        if self.times != other.times {
            return Err(Error::InvalidInput("traces are on different time grids".into()));
        }
        Ok(self.probability.iter().zip(&other.probability).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }

    /// Sub-trace with `lo <= t <= hi`.
    pub fn window(&self, lo: T, hi: T) -> Self {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.times[i] >= lo && self.times[i] <= hi).collect();
        Self {
            times: keep.iter().map(|&i| self.times[i]).collect(),
            amplitude: keep.iter().map(|&i| self.amplitude[i]).collect(),
            probability: keep.iter().map(|&i| self.probability[i]).collect(),
            method: self.method,
        }
    }
}

/// `0, step, 2 step, ..` up to and including `t_max` (within rounding).
pub fn uniform_times<T: Real>(t_max: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !(t_max >= T::zero()) || !t_max.is_finite() {
        return Err(Error::TimeGrid);
    }
    let n = (t_max / step + T::lit(1e-9)).floor().to_usize().ok_or(Error::TimeGrid)?;
    Ok((0..=n).map(|i| step * T::from_count(i)).collect())
}

fn check_grid<T: Real>(times: &[T], t_max: Option<T>) -> Result<()> {
    if times.is_empty() || !(times[0] >= T::zero()) {
        return Err(Error::TimeGrid);
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::TimeGrid);
    }
    if let Some(limit) = t_max {
        if times[times.len() - 1] > limit {
            return Err(Error::TimeGrid);
        }
    }
    Ok(())
}

/// Reference amplitude from the truncated chain; refuses grids past the
/// configured `t_max`.
pub fn survival_lattice_oracle<T: Real>(
    params: &ModelParams<T>,
    config: &LatticeConfig<T>,
    times: &[T],
) -> Result<SurvivalTrace<T>> {
    LatticeConfig::new(config.half_length, config.t_max)?;
    check_grid(times, Some(config.t_max))?;
    let spec = lattice_spectrum(params, config.half_length)?;
    let amplitude: Vec<Cplx<T>> = times.par_iter().map(|&t| spec.amplitude(t)).collect();
    Ok(SurvivalTrace::from_amplitudes(times.to_vec(), amplitude, SurvivalMethod::LatticeOracle))
}

/// `J1(2t)/t`, equal to 1 at `t = 0`.
pub fn bessel_kernel<T: Real>(t: T) -> T {
    if t == T::zero() {
        return T::one();
    }
    bessel_j01(T::lit(2.0) * t).1 / t
}

/// The three near-edge states used by the Bessel representation (the upper
/// bound state is left out).
pub fn bessel_states<T: Real>(params: &ModelParams<T>) -> Result<[DiscreteState<T>; 3]> {
    let near = near_lower_edge(&discrete_states(params)?);
    near.try_into()
        .map_err(|v: Vec<DiscreteState<T>>| Error::LabelMatching(format!("expected 3 near-edge states, found {}", v.len())))
}

/// Per-state pieces of the Bessel representation at each grid time:
/// `pole = psid_sq exp(-iEt)` and `branch = psid_sq (bracket - exp(-iEt))`,
/// where `bracket = exp(-iEt) (1 - i lambda int_0^t exp(iEt') J1(2t')/t' dt')`.
/// For an anti-resonance at late times `pole` and `branch` are huge and
/// cancel; `amplitude` holds the sum evaluated without that cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselTerms<T> {
    pub states: [DiscreteState<T>; 3],
    pub pole: Vec<[Cplx<T>; 3]>,
    pub branch: Vec<[Cplx<T>; 3]>,
    pub amplitude: Vec<Cplx<T>>,
}

/// Anti-resonances that would overflow the forward recursion are evaluated
/// from the tail `int_t^inf` instead (see [`bessel_sum_terms`]).
const TAIL_SWITCH: f64 = 5.0;
const TAIL_DEPTH: f64 = 40.0;

/// Evaluates the Bessel representation on a sorted grid with one quadrature
/// pass. Each state carries `S(t) = int_0^t exp(iE(t' - t)) f(t') dt'`,
/// updated panel by panel as `S(t_k) = exp(-iE dt) S(t_{k-1}) + int`. When
/// `Im E > 0` and `Im E t_max` is large the forward bracket cancels
/// catastrophically; since `i lambda int_0^inf exp(iEt') f = 1` for
/// `|lambda| > 1`, the bracket equals `i lambda int_t^inf exp(iE(t' - t)) f`,
/// which is accumulated backwards from a cutoff where it is below `e^-40`.
pub fn bessel_sum_terms<T: Real>(params: &ModelParams<T>, times: &[T]) -> Result<BesselTerms<T>> {
    check_grid(times, None)?;
    let states = bessel_states(params)?;
    let t_last = times[times.len() - 1];
    let tail: [bool; 3] =
        std::array::from_fn(|j| states[j].energy.im > T::zero() && states[j].energy.im * t_last > T::lit(TAIL_SWITCH));

    let mut edges = Vec::with_capacity(times.len() + 1);
    let offset = usize::from(times[0] > T::zero());
    if offset == 1 {
        edges.push(T::zero());
    }
    edges.extend_from_slice(times);
    let cutoff = (0..3)
        .filter(|&j| tail[j])
        .map(|j| t_last + T::lit(TAIL_DEPTH) / states[j].energy.im)
        .fold(t_last, T::max);
    if cutoff > t_last {
        let h = T::one();
        let mut t = t_last;
        while t < cutoff {
            t = (t + h).min(cutoff);
            edges.push(t);
        }
    }

    let energies: [Cplx<T>; 3] = std::array::from_fn(|j| states[j].energy);
    let tol = T::tol(1e-10, 64.0);
    let panels: Vec<[Cplx<T>; 3]> = (0..edges.len() - 1)
        .into_par_iter()
        .map(|p| {
            let (a, b) = (edges[p], edges[p + 1]);
            let refs: [T; 3] = std::array::from_fn(|j| if tail[j] { a } else { b });
            integrate(
                |tp: T| {
                    let f = bessel_kernel(tp);
                    std::array::from_fn(|j| (ii::<T>() * energies[j] * (tp - refs[j])).exp() * f)
                },
                a,
                b,
                tol,
            )
        })
        .collect::<Result<_>>()?;

    let n_edges = edges.len();
    let mut running = vec![[c(T::zero(), T::zero()); 3]; n_edges];
    for j in 0..3 {
        let e = energies[j];
        if tail[j] {
            for p in (0..n_edges - 1).rev() {
                let dt = edges[p + 1] - edges[p];
                running[p][j] = panels[p][j] + (ii::<T>() * e * dt).exp() * running[p + 1][j];
            }
        } else {
            for p in 0..n_edges - 1 {
                let dt = edges[p + 1] - edges[p];
                running[p + 1][j] = (-ii::<T>() * e * dt).exp() * running[p][j] + panels[p][j];
            }
        }
    }

    let mut pole = Vec::with_capacity(times.len());
    let mut branch = Vec::with_capacity(times.len());
    let mut amplitude = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let r = running[k + offset];
        let mut pk = [c(T::zero(), T::zero()); 3];
        let mut bk = pk;
        let mut total = c(T::zero(), T::zero());
        for j in 0..3 {
            let s = &states[j];
            let phase = (-ii::<T>() * s.energy * t).exp();
            let il = ii::<T>() * s.lambda;
            pk[j] = s.psid_sq * phase;
            if tail[j] {
                bk[j] = s.psid_sq * (il * r[j] - phase);
                total += s.psid_sq * il * r[j];
            } else {
                bk[j] = -s.psid_sq * il * r[j];
                total += pk[j] + bk[j];
            }
        }
        pole.push(pk);
        branch.push(bk);
        amplitude.push(total);
    }
    Ok(BesselTerms { states, pole, branch, amplitude })
}

/// Survival amplitude from the Bessel representation over the three
/// near-edge states.
pub fn survival_bessel_sum<T: Real>(params: &ModelParams<T>, times: &[T]) -> Result<SurvivalTrace<T>> {
    let terms = bessel_sum_terms(params, times)?;
    Ok(SurvivalTrace::from_amplitudes(times.to_vec(), terms.amplitude, SurvivalMethod::BesselSum))
}

/// `int_0^inf exp(iEt) J1(2t)/t dt = (sqrt(4 - E^2) + iE)/2` for `Im E > 0`
/// (principal square root, continued from real `|E| < 2`).
pub fn bessel_kernel_transform<T: Real>(energy: Cplx<T>) -> Cplx<T> {
    let four = c(T::lit(4.0), T::zero());
    let mut root = (four - energy * energy).sqrt();
    // Pick the branch that is analytic in the upper half plane: Im E -> +inf
    // needs sqrt(4 - E^2) ~ -iE so the sum decays.
    if (root + ii::<T>() * energy).norm() > (-root + ii::<T>() * energy).norm() {
        root = -root;
    }
    (root + ii::<T>() * energy) / T::lit(2.0)
}

/// `K_n(t) = int_0^t exp(-2it') t'^(n-1) J1(2t') dt'` in closed form,
/// `n` in `{0, 1, 2}`.
pub fn kn_closed_form<T: Real>(n: u32, t: T) -> Result<Cplx<T>> {
    if !(t >= T::zero()) {
        return Err(Error::Domain("K_n needs t >= 0".into()));
    }
    let two = T::lit(2.0);
    let (j0, j1) = bessel_j01(two * t);
    let ph = cis(-two * t);
    let i = ii::<T>();
    match n {
        0 => Ok(i * (ph * (c(j0, j1)) - T::one())),
        1 => Ok((c(T::one(), T::zero()) - ph * (c(j0, two * t * j0) - two * t * j1)) / two),
        2 => Ok(ph * (c(t * j1, T::one() * j1 - t * j0)) * t / T::lit(3.0)),
        _ => Err(Error::Domain(format!("K_{n} has no closed form here (n in 0..=2)"))),
    }
}

/// `K_n(t)` by adaptive quadrature of its defining integral.
pub fn kn_quadrature<T: Real>(n: u32, t: T, abs_tol: T) -> Result<Cplx<T>> {
    if !(t >= T::zero()) {
        return Err(Error::Domain("K_n needs t >= 0".into()));
    }
    if t == T::zero() {
        return Ok(c(T::zero(), T::zero()));
    }
    let two = T::lit(2.0);
    integrate(
        |tp: T| {
            let w = match n {
                0 => bessel_kernel(tp),
                _ => tp.powi(n as i32 - 1) * bessel_j01(two * tp).1,
            };
            cis(-two * tp) * w
        },
        T::zero(),
        t,
        abs_tol,
    )
}

/// `1 - g^2 t^(3/2) / (3 sqrt(2 pi))`.
pub fn survival_intermediate_law<T: Real>(g: T, t: T) -> T {
    T::one() - g * g * t.powf(T::lit(1.5)) / (T::lit(3.0) * (T::lit(2.0) * T::PI()).sqrt())
}

/// Intermediate-time amplitude `exp(2it) (1 - 2 g^2 t^(3/2) exp(-i pi/4) / (3 sqrt pi))`.
pub fn intermediate_amplitude<T: Real>(g: T, t: T) -> Cplx<T> {
    let a = T::lit(2.0) * g * g * t.powf(T::lit(1.5)) / (T::lit(3.0) * T::PI().sqrt());
    cis(T::lit(2.0) * t) * (c(T::one(), T::zero()) - cis(-T::FRAC_PI_4()) * a)
}

/// `|intermediate_amplitude|^2`; to order `g^2` this is
/// `1 - 4 g^2 t^(3/2) / (3 sqrt(2 pi))`, four times the decrement of
/// [`survival_intermediate_law`].
pub fn survival_intermediate_from_amplitude<T: Real>(g: T, t: T) -> T {
    intermediate_amplitude(g, t).norm_sqr()
}

fn bound_lower<T: Real>(params: &ModelParams<T>) -> Result<DiscreteState<T>> {
    discrete_states(params)?
        .into_iter()
        .filter(|s| s.class == StateClass::BoundLower)
        .min_by(|a, b| a.energy.re.partial_cmp(&b.energy.re).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or_else(|| Error::LabelMatching("no bound state below the band".into()))
}

/// The resonance with the smallest width.
pub fn resonance_state<T: Real>(params: &ModelParams<T>) -> Result<DiscreteState<T>> {
    discrete_states(params)?
        .into_iter()
        .filter(|s| s.class == StateClass::Resonance)
        .min_by(|a, b| a.energy.im.abs().partial_cmp(&b.energy.im.abs()).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or_else(|| Error::LabelMatching("no resonance".into()))
}

/// Long-time amplitude `2/3 exp(-iE_B t) + 2/3 exp(-iE_R t) - exp(i pi/4) exp(2it) / (sqrt(pi) g^2 t^(3/2))`
/// with exact `E_B`, `E_R`.
pub fn longtime_amplitude<T: Real>(params: &ModelParams<T>, t: T) -> Result<Cplx<T>> {
    let eb = bound_lower(params)?.energy;
    let er = resonance_state(params)?.energy;
    let two_thirds = T::lit(2.0) / T::lit(3.0);
    let g2 = params.g() * params.g();
    let i = ii::<T>();
    let tail = cis(T::FRAC_PI_4() + T::lit(2.0) * t) / (T::PI().sqrt() * g2 * t.powf(T::lit(1.5)));
    Ok((-i * eb * t).exp() * two_thirds + (-i * er * t).exp() * two_thirds - tail)
}

pub fn survival_longtime_law<T: Real>(params: &ModelParams<T>, t: T) -> Result<T> {
    Ok(longtime_amplitude(params, t)?.norm_sqr())
}

/// Trace of one of the analytic laws on a grid.
pub fn survival_law_trace<T: Real>(
    params: &ModelParams<T>,
    times: &[T],
    method: SurvivalMethod,
) -> Result<SurvivalTrace<T>> {
    check_grid(times, None)?;
    let amplitude: Vec<Cplx<T>> = match method {
        SurvivalMethod::IntermediateLaw => times.iter().map(|&t| intermediate_amplitude(params.g(), t)).collect(),
        SurvivalMethod::LongTimeLaw => times.iter().map(|&t| longtime_amplitude(params, t)).collect::<Result<_>>()?,
        other => return Err(Error::InvalidInput(format!("{other} is not an analytic law"))),
    };
    let mut trace = SurvivalTrace::from_amplitudes(times.to_vec(), amplitude, method);
    if method == SurvivalMethod::IntermediateLaw {
        trace.probability = times.iter().map(|&t| survival_intermediate_law(params.g(), t)).collect();
    }
    Ok(trace)
}

/// At time `t`: (i) the pole sum `sum_j psid_sq_j exp(-iE_j t)` and (ii) the
/// branch integral sum of the Bessel representation.
pub fn expansion_term_checks<T: Real>(params: &ModelParams<T>, t: T) -> Result<(Cplx<T>, Cplx<T>)> {
    let terms = bessel_sum_terms(params, &[t])?;
    let zero = c(T::zero(), T::zero());
    let pole = terms.pole[0].iter().fold(zero, |a, &b| a + b);
    let branch = terms.branch[0].iter().fold(zero, |a, &b| a + b);
    Ok((pole, branch))
}

/// Long-time occupation `|psid_sq (1 - lambda^2)|^2` of the lower bound state.
pub fn asymptotic_plateau<T: Real>(params: &ModelParams<T>) -> Result<T> {
    Ok(bound_lower(params)?.residue().norm_sqr())
}

/// Exact resonance lifetime `1 / (2 |Im E_R|)`.
pub fn resonance_lifetime<T: Real>(params: &ModelParams<T>) -> Result<T> {
    Ok(T::one() / (T::lit(2.0) * resonance_state(params)?.energy.im.abs()))
}

/// Leading-order lifetime at `epsilon_d = -2`: `2^(2/3) / (sqrt 3 g^(4/3))`.
pub fn puiseux_lifetime<T: Real>(g: T) -> T {
    T::lit(2.0).powf(T::lit(2.0 / 3.0)) / (T::lit(3.0).sqrt() * g.powf(T::lit(4.0 / 3.0)))
}

/// Quadratic coefficient of `1 - P(t)` fitted through the origin.
pub fn zeno_coefficient<T: Real>(trace: &SurvivalTrace<T>) -> Result<T> {
    let ys: Vec<T> = trace.probability.iter().map(|p| T::one() - *p).collect();
    fit::quadratic_coefficient(&trace.times, &ys)
}

/// First index whose value is strictly below every neighbour within
/// `half_window` samples on both sides.
pub fn first_local_minimum<T: Real>(values: &[T], half_window: usize) -> Option<usize> {
    let w = half_window.max(1);
    (w..values.len().saturating_sub(w)).find(|&i| {
        let v = values[i];
        (i - w..=i + w).all(|k| k == i || values[k] > v)
    })
}

/// Dominant angular frequency of a uniformly sampled signal: mean removed,
/// Hann window, zero padding to at least `pad` times the length, peak
/// refined by a parabola through the three largest bins. Frequencies below
/// `min_omega` are ignored.
pub fn dominant_frequency<T: Real + FftNum>(step: T, values: &[T], min_omega: T, pad: usize) -> Result<T> {
    let n = values.len();
    if n < 8 || !(step > T::zero()) {
        return Err(Error::InvalidInput("frequency estimate needs 8+ samples and a positive step".into()));
    }
    let mean = values.iter().fold(T::zero(), |a, &b| a + b) / T::from_count(n);
    let len = (n * pad.max(1)).next_power_of_two();
    let mut buf: Vec<Complex<T>> = vec![Complex::new(T::zero(), T::zero()); len];
    for (k, v) in values.iter().enumerate() {
        let hann = T::lit(0.5) - T::lit(0.5) * (T::lit(2.0) * T::PI() * T::from_count(k) / T::from_count(n - 1)).cos();
        buf[k] = Complex::new((*v - mean) * hann, T::zero());
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let d_omega = T::lit(2.0) * T::PI() / (T::from_count(len) * step);
    let mags: Vec<T> = buf[..len / 2].iter().map(|z| z.norm()).collect();
    let k = (1..len / 2 - 1)
        .filter(|&k| T::from_count(k) * d_omega >= min_omega)
        .max_by(|&a, &b| mags[a].partial_cmp(&mags[b]).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or_else(|| Error::InvalidInput("no frequency bins above the cutoff".into()))?;
    let (a, b, cc) = (mags[k - 1], mags[k], mags[k + 1]);
    let den = a - T::lit(2.0) * b + cc;
    let shift = if den != T::zero() { T::lit(0.5) * (a - cc) / den } else { T::zero() };
    Ok((T::from_count(k) + shift) * d_omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(eps: f64, g: f64) -> ModelParams<f64> {
        ModelParams::new(eps, g).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert_eq!(uniform_times(1.0, 0.25).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(matches!(check_grid(&[0.0, 2.0, 1.0], None), Err(Error::TimeGrid)));
        assert!(matches!(check_grid(&[-1.0, 0.0], None), Err(Error::TimeGrid)));
        let cfg = LatticeConfig::new(40, 10.0).unwrap();
        assert!(matches!(survival_lattice_oracle(&p(-2.0, 0.1), &cfg, &[0.0, 11.0]), Err(Error::TimeGrid)));
    }

    #[test]
    fn kn_at_zero_and_infinity() {
        for n in 0..3 {
            assert!(kn_closed_form(n, 0.0).unwrap().norm() < 1e-15);
        }
        assert!((kn_closed_form(0, 1e5).unwrap() + ii::<f64>()).norm() < 1e-2);
        assert!(kn_closed_form(3, 1.0).is_err());
    }

    #[test]
    fn kn_closed_form_matches_quadrature() {
        for n in 0..3 {
            for t in [0.5, 5.0, 50.0] {
                let a = kn_closed_form(n, t).unwrap();
                let b = kn_quadrature(n, t, 1e-12).unwrap();
                assert!((a - b).norm() < 1e-10, "K_{n}({t}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn kernel_transform_identity() {
        // i lambda F_inf = 1 for the anti-resonance.
        let s = bessel_states(&p(-2.0, 0.3)).unwrap();
        let a = s.iter().find(|s| s.energy.im > 0.0).unwrap();
        let f = bessel_kernel_transform(a.energy);
        assert!((ii::<f64>() * a.lambda * f - 1.0).norm() < 1e-12);
        // Direct check against quadrature for a strongly damped energy.
        let e = c(-1.0, 0.5);
        let q = integrate(|t: f64| (ii::<f64>() * e * t).exp() * bessel_kernel(t), 0.0, 120.0, 1e-13).unwrap();
        assert!((q - bessel_kernel_transform(e)).norm() < 1e-11);
    }

    #[test]
    fn bessel_sum_starts_at_residue_sum() {
        let params = p(-2.0, 0.05);
        let tr = survival_bessel_sum(&params, &[0.0, 1.0]).unwrap();
        let s = bessel_states(&params).unwrap();
        let sum = s.iter().fold(c(0.0, 0.0), |a, st| a + st.psid_sq);
        assert!((tr.amplitude[0] - sum).norm() < 1e-14);
        assert!((sum - 1.0).norm() < 1e-4);
    }

    #[test]
    fn oracle_and_bessel_agree_at_moderate_coupling() {
        let params = p(-2.0, 0.2);
        let times = uniform_times(40.0, 0.5).unwrap();
        let cfg = LatticeConfig::for_time(40.0).unwrap();
        let o = survival_lattice_oracle(&params, &cfg, &times).unwrap();
        let b = survival_bessel_sum(&params, &times).unwrap();
        // The omitted upper bound state carries weight ~ g^2/32; the gap is
        // about twice that (cross term with an amplitude of modulus ~ 1).
        let upper = discrete_states(&params).unwrap().into_iter().find(|s| s.class == StateClass::BoundUpper).unwrap();
        let gap = o.max_probability_difference(&b).unwrap();
        assert!(gap < 2.5 * upper.psid_sq.re && gap > 1.5 * upper.psid_sq.re, "{gap}");
        assert!((o.probability[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_form_matches_forward_form() {
        // Same grid evaluated with and without the backward tail for A.
        let params = p(-2.0, 0.3);
        let short = survival_bessel_sum(&params, &uniform_times(20.0, 1.0).unwrap()).unwrap();
        let long = survival_bessel_sum(&params, &uniform_times(400.0, 1.0).unwrap()).unwrap();
        for k in 0..short.len() {
            assert!((short.amplitude[k] - long.amplitude[k]).norm() < 1e-8, "t = {}", short.times[k]);
        }
    }

    #[test]
    fn late_times_settle_on_plateau() {
        // exp(Im E_A t) reaches ~1e26 here; the amplitude must not see it.
        let params = p(-2.0, 0.1);
        let tr = survival_bessel_sum(&params, &uniform_times(6000.0, 1.0).unwrap()).unwrap();
        assert!(tr.probability.iter().all(|&v| (0.0..=1.0 + 1e-9).contains(&v)));
        let plat = asymptotic_plateau(&params).unwrap();
        assert!((tr.probability[6000] - plat).abs() < 1e-3);
    }

    #[test]
    fn zeno_coefficient_is_variance() {
        let params = p(-2.0, 0.1);
        let times = uniform_times(0.01, 0.0001).unwrap();
        let o = survival_lattice_oracle(&params, &LatticeConfig::new(20, 0.01).unwrap(), &times).unwrap();
        assert!((zeno_coefficient(&o).unwrap() / 0.01 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn plateau_limits() {
        assert!((asymptotic_plateau(&p(-2.0, 1e-3)).unwrap() - 4.0 / 9.0).abs() < 1e-3);
        assert!(asymptotic_plateau(&p(-3.0, 0.1)).unwrap() > 0.9);
    }

    #[test]
    fn lifetime_near_leading_order() {
        let exact = resonance_lifetime(&p(-2.0, 0.02)).unwrap();
        assert!((exact / puiseux_lifetime(0.02) - 1.0).abs() < 0.02);
        assert!(exact > 160.0 && exact < 190.0);
    }

    #[test]
    fn laws_at_origin_and_infinity() {
        assert_eq!(survival_intermediate_law(0.02, 0.0), 1.0);
        assert!((survival_intermediate_law(0.02_f64, 100.0) - (1.0 - 0.4 / 7.519885)).abs() < 1e-6);
        let params = p(-2.0, 0.02);
        let mut far = 0.0;
        for k in 0..200 {
            far += survival_longtime_law(&params, 1e7 + 37.0 * k as f64).unwrap() / 200.0;
        }
        // Averaged over the oscillation the cross term drops; |2/3|^2 remains.
        assert!((far - 4.0 / 9.0).abs() < 1e-3);
    }

    #[test]
    fn fft_recovers_a_known_frequency() {
        let step = 0.5;
        let v: Vec<f64> = (0..4000).map(|k| (0.0123 * k as f64 * step).cos() * 0.3 + 0.1).collect();
        let w = dominant_frequency(step, &v, 1e-3, 8).unwrap();
        assert!((w / 0.0123 - 1.0).abs() < 2e-3, "{w}");
    }

    #[test]
    fn local_minimum_with_window() {
        let v = [3.0, 2.0, 2.5, 1.0, 0.5, 0.7, 2.0, 0.1];
        assert_eq!(first_local_minimum(&v, 1), Some(1));
        assert_eq!(first_local_minimum(&v, 2), Some(4));
    }
}
