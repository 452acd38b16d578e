//! Exact discrete spectrum: the quartics in `lambda` and `E`, state
//! classification, normalized residues and parameter scans.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{energy_from_lambda, on_cut_tolerance, ModelParams};
use crate::poly::Polynomial;
use crate::scalar::{c, re, Cplx, Real};

/// Kind of discrete state, read off from `lambda` and `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StateClass {
    BoundLower,
    BoundUpper,
    Virtual,
    Resonance,
    AntiResonance,
}

impl StateClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StateClass::BoundLower => "bound_lower",
            StateClass::BoundUpper => "bound_upper",
            StateClass::Virtual => "virtual",
            StateClass::Resonance => "resonance",
            StateClass::AntiResonance => "anti_resonance",
        }
    }
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A root of the `lambda` quartic with its energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaRoot<T> {
    pub lambda: Cplx<T>,
    pub energy: Cplx<T>,
}

/// A classified and normalized discrete state.
///
/// `psi0_sq` and `psid_sq` are the squares `<0|psi>^2`, `<d|psi>^2` (not moduli).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteState<T> {
    pub lambda: Cplx<T>,
    pub energy: Cplx<T>,
    pub class: StateClass,
    pub psi0_sq: Cplx<T>,
    pub psid_sq: Cplx<T>,
}

impl<T: Real> DiscreteState<T> {
    /// Residue of the emitter propagator at this pole, `<d|psi>^2 (1 - lambda^2)`.
    pub fn residue(&self) -> Cplx<T> {
        self.psid_sq * (re(T::one()) - self.lambda * self.lambda)
    }
}

/// `f(lambda) = -lambda^4 - eps lambda^3 - g^2 lambda^2 + eps lambda + 1`.
pub fn lambda_quartic<T: Real>(params: &ModelParams<T>) -> Polynomial<T> {
    let e = params.epsilon_d();
    let g2 = params.g() * params.g();
    Polynomial::from_real(&[T::one(), e, -g2, -e, -T::one()])
}

/// The `lambda` quartic at a complex emitter energy.
pub fn lambda_quartic_complex<T: Real>(eps: Cplx<T>, g: T) -> Polynomial<T> {
    let one = re(T::one());
    Polynomial::new(vec![one, eps, re(-g * g), -eps, -one])
}

/// `p(E) = (E - eps)^2 (E^2 - 4) - g^4`.
pub fn energy_quartic<T: Real>(params: &ModelParams<T>) -> Polynomial<T> {
    energy_quartic_complex(c(params.epsilon_d(), T::zero()), params.g())
}

/// `p(E)` for complex `epsilon_d`.
pub fn energy_quartic_complex<T: Real>(eps: Cplx<T>, g: T) -> Polynomial<T> {
    let four = re(T::lit(4.0));
    let two = T::lit(2.0);
    let g4 = re(g.powi(4));
    // (E^2 - 2 eps E + eps^2)(E^2 - 4)
    Polynomial::new(vec![
        -four * eps * eps - g4,
        four * two * eps,
        eps * eps - four,
        -eps * two,
        re(T::one()),
    ])
}

fn root_tolerance<T: Real>() -> T {
    T::tol(1e-12, 64.0)
}

/// All four roots of the `lambda` quartic, polished.
pub fn solve_lambda_quartic<T: Real>(params: &ModelParams<T>) -> Result<Vec<LambdaRoot<T>>> {
    lambda_quartic(params)
        .roots(root_tolerance())?
        .into_iter()
        .map(|lambda| Ok(LambdaRoot { lambda, energy: energy_from_lambda(lambda)? }))
        .collect()
}

/// All four roots of `p(E)`, polished.
pub fn solve_energy_quartic<T: Real>(params: &ModelParams<T>) -> Result<Vec<Cplx<T>>> {
    energy_quartic(params).roots(root_tolerance())
}

/// Roots of `p(E)` at a complex emitter energy.
pub fn solve_energy_quartic_complex<T: Real>(eps: Cplx<T>, g: T) -> Result<Vec<Cplx<T>>> {
    energy_quartic_complex(eps, g).roots(root_tolerance())
}

/// Roots of the `lambda` quartic at a complex emitter energy.
pub fn solve_lambda_quartic_complex<T: Real>(eps: Cplx<T>, g: T) -> Result<Vec<LambdaRoot<T>>> {
    lambda_quartic_complex(eps, g)
        .roots(root_tolerance())?
        .into_iter()
        .map(|lambda| Ok(LambdaRoot { lambda, energy: energy_from_lambda(lambda)? }))
        .collect()
}

fn is_real<T: Real>(z: Cplx<T>) -> bool {
    z.im.abs() < T::tol(1e-9, 64.0) * (T::one() + z.norm())
}

/// Classifies a root off the unit circle.
pub fn classify_state<T: Real>(lambda: Cplx<T>, energy: Cplx<T>) -> Result<StateClass> {
    let modulus = lambda.norm();
    if (T::one() - modulus).abs() < on_cut_tolerance::<T>() {
        let other = lambda.inv();
        return Err(Error::BranchCut {
            root_a_re: lambda.re.to_f64().unwrap_or(f64::NAN),
            root_a_im: lambda.im.to_f64().unwrap_or(f64::NAN),
            root_b_re: other.re.to_f64().unwrap_or(f64::NAN),
            root_b_im: other.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    let real = is_real(lambda);
    Ok(if modulus < T::one() {
        if !real {
            // Off-axis first-sheet roots do not occur for real parameters;
            // the energy sign keeps the classification total anyway.
            if energy.im < T::zero() {
                StateClass::Resonance
            } else {
                StateClass::AntiResonance
            }
        } else if lambda.re > T::zero() {
            StateClass::BoundLower
        } else {
            StateClass::BoundUpper
        }
    } else if real {
        StateClass::Virtual
    } else if energy.im < T::zero() {
        StateClass::Resonance
    } else {
        StateClass::AntiResonance
    })
}

/// `D(lambda) = g^2 lambda^2 (1 + lambda^2) + (1 - lambda^2)^3`.
pub fn normalization_denominator<T: Real>(params: &ModelParams<T>, lambda: Cplx<T>) -> Cplx<T> {
    let one = re(T::one());
    let l2 = lambda * lambda;
    let w = one - l2;
    l2 * (one + l2) * (params.g() * params.g()) + w * w * w
}

/// Squared components `(<0|psi>^2, <d|psi>^2)` of the state at `lambda`.
pub fn normalize_state<T: Real>(params: &ModelParams<T>, lambda: Cplx<T>) -> Result<(Cplx<T>, Cplx<T>)> {
    let d = normalization_denominator(params, lambda);
    if !(d.norm() > T::epsilon() * T::epsilon()) {
        return Err(Error::DegenerateNormalization(d.norm().to_f64().unwrap_or(0.0)));
    }
    let one = re(T::one());
    let l2 = lambda * lambda;
    let w = one - l2;
    let g2 = params.g() * params.g();
    Ok((l2 * g2 / d, w * w / d))
}

/// `(1 + lambda^2) psi0_sq + (1 - lambda^2) psid_sq - 1`.
pub fn normalization_residual<T: Real>(state: &DiscreteState<T>) -> Cplx<T> {
    let one = re(T::one());
    let l2 = state.lambda * state.lambda;
    (one + l2) * state.psi0_sq + (one - l2) * state.psid_sq - one
}

/// Four classified, normalized states.
pub fn discrete_states<T: Real>(params: &ModelParams<T>) -> Result<Vec<DiscreteState<T>>> {
    solve_lambda_quartic(params)?
        .into_iter()
        .map(|root| {
            let class = classify_state(root.lambda, root.energy)?;
            let (psi0_sq, psid_sq) = normalize_state(params, root.lambda)?;
            Ok(DiscreteState { lambda: root.lambda, energy: root.energy, class, psi0_sq, psid_sq })
        })
        .collect()
}

/// Signed amplitudes `(<0|psi>, <d|psi>)`.
///
/// Convention: `<0|psi>` is the principal square root of `psi0_sq`, and
/// `<d|psi>` follows from `(1 - lambda^2)<0|psi> = g lambda <d|psi>`. When that
/// relation is empty (`g lambda = 0`) `<d|psi>` is the principal root as well.
pub fn signed_components<T: Real>(params: &ModelParams<T>, state: &DiscreteState<T>) -> (Cplx<T>, Cplx<T>) {
    let psi0 = state.psi0_sq.sqrt();
    let gl = state.lambda * params.g();
    let psid = if gl.norm() > T::zero() && psi0.norm() > T::zero() {
        (re(T::one()) - state.lambda * state.lambda) * psi0 / gl
    } else {
        state.psid_sq.sqrt()
    };
    (psi0, psid)
}

/// Residuals of the two coupled equations for the signed amplitudes:
/// `(1 - lambda^2) psi0 - g lambda psid` and `(E - eps) psid + g psi0`.
pub fn component_residuals<T: Real>(params: &ModelParams<T>, state: &DiscreteState<T>) -> (Cplx<T>, Cplx<T>) {
    let (psi0, psid) = signed_components(params, state);
    let g = params.g();
    let r1 = (re(T::one()) - state.lambda * state.lambda) * psi0 - state.lambda * psid * g;
    let r2 = (state.energy - re(params.epsilon_d())) * psid + psi0 * g;
    (r1, r2)
}

/// Chain amplitude `<x|psi> = lambda^|x| <0|psi>`.
pub fn eigenstate_profile<T: Real>(params: &ModelParams<T>, state: &DiscreteState<T>, x: i64) -> Cplx<T> {
    let (psi0, _) = signed_components(params, state);
    let n = x.unsigned_abs();
    let n = i32::try_from(n).unwrap_or(i32::MAX);
    psi0 * state.lambda.powi(n)
}

/// The three states that meet at the lower band edge as `g -> 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdTriplet<T> {
    pub bound: DiscreteState<T>,
    pub resonance: DiscreteState<T>,
    pub anti_resonance: DiscreteState<T>,
}

impl<T: Real> ThresholdTriplet<T> {
    /// States in the order bound, resonance, anti-resonance, with their
    /// phase indices `alpha = 0, -1, +1`.
    pub fn with_alpha(&self) -> [(i32, DiscreteState<T>); 3] {
        [(0, self.bound), (-1, self.resonance), (1, self.anti_resonance)]
    }
}

/// The three states nearest the lower edge: all but the one with largest `Re E`.
pub fn near_lower_edge<T: Real>(states: &[DiscreteState<T>]) -> Vec<DiscreteState<T>> {
    let mut v = states.to_vec();
    v.sort_by(|a, b| a.energy.re.partial_cmp(&b.energy.re).unwrap_or(std::cmp::Ordering::Equal));
    v.truncate(3);
    v
}

/// Labels the near-edge triplet by `arg(lambda - 1)`, nearest to `pi`
/// (bound), `+pi/3` (resonance) and `-pi/3` (anti-resonance).
pub fn label_threshold_triplet<T: Real>(states: &[DiscreteState<T>]) -> Result<ThresholdTriplet<T>> {
    let near = near_lower_edge(states);
    if near.len() != 3 {
        return Err(Error::LabelMatching(format!("expected 3 near-edge states, found {}", near.len())));
    }
    let pi = T::PI();
    let targets = [pi, pi / T::lit(3.0), -pi / T::lit(3.0)];
    let ang = |z: Cplx<T>, target: T| {
        let a = (z - re(T::one())).arg();
        let d = (a - target).abs();
        d.min(T::lit(2.0) * pi - d)
    };
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut best: Option<([usize; 3], T, T)> = None;
    for p in perms {
        let dists: Vec<T> = (0..3).map(|k| ang(near[p[k]].lambda, targets[k])).collect();
        let total = dists.iter().fold(T::zero(), |a, &b| a + b);
        let worst = dists.iter().fold(T::zero(), |a, &b| a.max(b));
        if best.is_none_or(|(_, t, _)| total < t) {
            best = Some((p, total, worst));
        }
    }
    let (p, _, worst) = best.expect("six permutations checked");
    if worst >= pi / T::lit(6.0) {
        return Err(Error::LabelMatching(format!(
            "largest angular mismatch {:.3} rad; coupling too large for threshold labels",
            worst.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let t = ThresholdTriplet { bound: near[p[0]], resonance: near[p[1]], anti_resonance: near[p[2]] };
    if t.bound.class != StateClass::BoundLower {
        return Err(Error::LabelMatching(format!("bound label fell on a {} state", t.bound.class)));
    }
    Ok(t)
}

/// Convenience: exact triplet at the given parameters.
pub fn threshold_triplet<T: Real>(params: &ModelParams<T>) -> Result<ThresholdTriplet<T>> {
    label_threshold_triplet(&discrete_states(params)?)
}

/// One classified state of an `epsilon_d` scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow<T> {
    pub epsilon_d: T,
    pub state: DiscreteState<T>,
}

/// Near-lower-edge states for `epsilon_d` from `eps_min` to `eps_max`
/// (inclusive, up to rounding) in steps of `step`, ordered by `epsilon_d`
/// then by class then by `Re E`.
pub fn spectrum_scan<T: Real>(g: T, eps_min: T, eps_max: T, step: T) -> Result<Vec<ScanRow<T>>> {
    if !(step > T::zero()) || !(eps_max >= eps_min) {
        return Err(Error::InvalidInput("scan needs step > 0 and eps_max >= eps_min".into()));
    }
    let span = ((eps_max - eps_min) / step + T::lit(1e-9)).floor();
    let n = span.to_usize().ok_or_else(|| Error::InvalidInput("scan range too large".into()))?;
    let rows: Result<Vec<Vec<ScanRow<T>>>> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let eps = eps_min + step * T::from_count(i);
            let params = ModelParams::new(eps, g)?;
            let mut near = near_lower_edge(&discrete_states(&params)?);
            near.sort_by(|a, b| {
                a.class.cmp(&b.class).then(a.energy.re.partial_cmp(&b.energy.re).unwrap_or(std::cmp::Ordering::Equal))
            });
            Ok(near.into_iter().map(|state| ScanRow { epsilon_d: eps, state }).collect())
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::multiset_distance;
    use proptest::prelude::*;

    fn p(eps: f64, g: f64) -> ModelParams<f64> {
        ModelParams::new(eps, g).unwrap()
    }

    fn cx(a: f64, b: f64) -> Cplx<f64> {
        Cplx::new(a, b)
    }

    #[test]
    fn decoupled_threshold_roots() {
        let roots = solve_lambda_quartic(&p(-2.0, 0.0)).unwrap();
        let ls: Vec<_> = roots.iter().map(|r| r.lambda).collect();
        assert!(multiset_distance(&ls, &[cx(1.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0), cx(-1.0, 0.0)]) < 1e-4);
        let es = solve_energy_quartic(&p(-2.0, 0.0)).unwrap();
        assert!(multiset_distance(&es, &[cx(-2.0, 0.0), cx(-2.0, 0.0), cx(-2.0, 0.0), cx(2.0, 0.0)]) < 1e-4);
    }

    #[test]
    fn decoupled_off_threshold() {
        let s5 = 5f64.sqrt();
        let ls: Vec<_> = solve_lambda_quartic(&p(-3.0, 0.0)).unwrap().iter().map(|r| r.lambda).collect();
        let expect = [cx((3.0 - s5) / 2.0, 0.0), cx((3.0 + s5) / 2.0, 0.0), cx(1.0, 0.0), cx(-1.0, 0.0)];
        assert!(multiset_distance(&ls, &expect) < 1e-12);
        let small = (3.0 - s5) / 2.0;
        let (psi0, psid) = normalize_state(&p(-3.0, 0.0), cx(small, 0.0)).unwrap();
        assert_eq!(psi0, cx(0.0, 0.0));
        assert!((psid.re - 1.0 / (1.0 - small * small)).abs() < 1e-12);
    }

    #[test]
    fn fig1_parameters() {
        let params = p(-2.0, 0.5);
        let states = discrete_states(&params).unwrap();
        let bl: Vec<_> = states.iter().filter(|s| s.class == StateClass::BoundLower).collect();
        assert_eq!(bl.len(), 1);
        assert!((bl[0].energy.re + 2.245093).abs() < 1e-5);
        assert!((bl[0].lambda.re - 0.612536).abs() < 1e-5);
        let bu: Vec<_> = states.iter().filter(|s| s.class == StateClass::BoundUpper).collect();
        assert_eq!(bu.len(), 1);
        assert!(bu[0].lambda.re < -0.9 && bu[0].lambda.re > -1.0);
        assert!(((bu[0].energy.re - 2.0) * 64.0 - 0.0625).abs() < 0.002);
        let r = states.iter().filter(|s| s.class == StateClass::Resonance).count();
        let a = states.iter().filter(|s| s.class == StateClass::AntiResonance).count();
        assert_eq!((r, a), (1, 1));
        for s in &states {
            assert!(normalization_residual(s).norm() < 1e-12);
            let (r1, r2) = component_residuals(&params, s);
            assert!(r1.norm() < 1e-9 && r2.norm() < 1e-9);
            assert!(lambda_quartic(&params).eval(s.lambda).norm() < 1e-10);
        }
    }

    #[test]
    fn energy_roots_match_lambda_roots() {
        for (eps, g) in [(-2.0, 0.5), (-2.0, 0.1), (-1.9, 0.1), (0.0, 0.3), (-3.0, 0.1)] {
            let params = p(eps, g);
            let from_l: Vec<_> = solve_lambda_quartic(&params).unwrap().iter().map(|r| r.energy).collect();
            let es = solve_energy_quartic(&params).unwrap();
            assert!(multiset_distance(&from_l, &es) < 1e-9, "eps {eps} g {g}");
            let sum: Cplx<f64> = es.iter().sum();
            assert!((sum - cx(2.0 * eps, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_state(cx(0.5, 0.0), cx(-2.5, 0.0)).unwrap(), StateClass::BoundLower);
        assert_eq!(classify_state(cx(-0.5, 0.0), cx(2.5, 0.0)).unwrap(), StateClass::BoundUpper);
        assert!(matches!(classify_state(cx(1.0, 0.0), cx(-2.0, 0.0)), Err(Error::BranchCut { .. })));
        let states = discrete_states(&p(-2.1, 0.1)).unwrap();
        assert_eq!(states.iter().filter(|s| s.class == StateClass::Virtual).count(), 2);
    }

    #[test]
    fn bound_norm_tends_to_leading_coefficient() {
        let g: f64 = 0.02;
        let t = threshold_triplet(&p(-2.0, g)).unwrap();
        let scaled = t.bound.psid_sq.re * g.powf(2.0 / 3.0);
        assert!((scaled - 2f64.cbrt() / 3.0).abs() < 0.03, "{scaled}");
    }

    #[test]
    fn triplet_labels_follow_phases() {
        let t = threshold_triplet(&p(-2.0, 0.01)).unwrap();
        assert_eq!(t.resonance.class, StateClass::Resonance);
        assert_eq!(t.anti_resonance.class, StateClass::AntiResonance);
        assert!(t.resonance.energy.im < 0.0);
    }

    #[test]
    fn bound_profile_decays_and_sums() {
        let params = p(-2.0, 0.5);
        let states = discrete_states(&params).unwrap();
        let b = states.iter().find(|s| s.class == StateClass::BoundLower).unwrap();
        let r = states.iter().find(|s| s.class == StateClass::Resonance).unwrap();
        let a1 = eigenstate_profile(&params, b, 5).norm();
        let a2 = eigenstate_profile(&params, b, 6).norm();
        assert!((a2 / a1 - b.lambda.norm()).abs() < 1e-12);
        assert!(eigenstate_profile(&params, r, 6).norm() > eigenstate_profile(&params, r, 5).norm());
        // Chain weight plus emitter weight is the bound-state Hermitian norm.
        let (psi0, psid) = signed_components(&params, b);
        let mut total = psid.norm_sqr();
        for x in -200i64..=200 {
            total += eigenstate_profile(&params, b, x).norm_sqr();
        }
        let l2 = b.lambda.re * b.lambda.re;
        let expect = psid.norm_sqr() + psi0.norm_sqr() * (1.0 + l2) / (1.0 - l2);
        assert!((total - expect).abs() < 1e-12);
        assert!((total * (1.0 - l2) - 1.0).abs() < 1e-12, "{total}");
    }

    #[test]
    fn scan_topology_fig3() {
        let rows = spectrum_scan(0.1, -2.15, -1.85, 0.05).unwrap();
        let at = |eps: f64| rows.iter().filter(move |r| (r.epsilon_d - eps).abs() < 1e-9).collect::<Vec<_>>();
        let low = at(-2.15);
        assert_eq!(low.len(), 3);
        assert_eq!(low.iter().filter(|r| r.state.class == StateClass::Virtual).count(), 2);
        let high = at(-1.9);
        let classes: Vec<_> = high.iter().map(|r| r.state.class).collect();
        assert_eq!(classes, vec![StateClass::BoundLower, StateClass::Resonance, StateClass::AntiResonance]);
        for r in &rows {
            if r.state.class == StateClass::BoundLower {
                assert!(r.state.energy.re < -2.0);
            }
        }
        assert_eq!(rows.iter().filter(|r| r.state.class == StateClass::BoundLower).count(), 7);
    }

    #[test]
    fn degenerate_normalization_at_coalescence() {
        assert!(matches!(normalize_state(&p(-2.0, 0.0), cx(1.0, 0.0)), Err(Error::DegenerateNormalization(_))));
    }

    #[test]
    fn f32_roots() {
        let params = ModelParams::<f32>::new(-2.0, 0.5).unwrap();
        let states = discrete_states(&params).unwrap();
        assert_eq!(states.len(), 4);
        assert!(states.iter().any(|s| s.class == StateClass::BoundLower && (s.energy.re + 2.2451).abs() < 1e-3));
    }

    proptest! {
        #[test]
        fn roots_pair_and_satisfy_quartic(eps in -3.0..1.0f64, g in 0.01..1.0f64) {
            let params = p(eps, g);
            let roots = solve_lambda_quartic(&params).unwrap();
            let es = solve_energy_quartic(&params).unwrap();
            let from_l: Vec<_> = roots.iter().map(|r| r.energy).collect();
            prop_assert!(multiset_distance(&from_l, &es) < 1e-8);
            for r in &roots {
                prop_assert!(lambda_quartic(&params).eval(r.lambda).norm() < 1e-10);
                let (a, b) = normalize_state(&params, r.lambda).unwrap();
                let l2 = r.lambda * r.lambda;
                let id = (cx(1.0, 0.0) + l2) * a + (cx(1.0, 0.0) - l2) * b;
                prop_assert!((id - cx(1.0, 0.0)).norm() < 1e-9);
            }
            // Conjugate pairing for real parameters.
            for e in &es {
                prop_assert!(es.iter().any(|f| (f - e.conj()).norm() < 1e-7));
            }
        }
    }
}
