use thiserror::Error;

/// Errors reported by the spectral, dynamical and threshold routines.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type used
/// for the computation, so the error type is not generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("energy lies on the branch cut [-2, 2]: both roots ({root_a_re}{root_a_im:+}i, {root_b_re}{root_b_im:+}i) have |lambda| = 1")]
    BranchCut {
        root_a_re: f64,
        root_a_im: f64,
        root_b_re: f64,
        root_b_im: f64,
    },

    #[error("energy {0} is a branch point of the self-energy")]
    BranchPoint(f64),

    #[error("root polish did not converge: residual {residual:e} exceeds {tolerance:e}")]
    RootPolish { residual: f64, tolerance: f64 },

    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("normalization denominator vanishes (|D| = {0:e}); states are coalesced")]
    DegenerateNormalization(f64),

    #[error("Puiseux expansion of the norm diverges at g = 0")]
    PuiseuxDivergence,

    #[error("coupling g = {0} outside the admissible range")]
    CouplingOutOfRange(f64),

    #[error("no self-energy branch yields a double root (best |p'| = {0:e})")]
    EpConsistency(f64),

    #[error("could not match states to the bound/resonance/anti-resonance triplet: {0}")]
    LabelMatching(String),

    #[error("lattice too short: N = {half_length} must exceed 2 t_max + 10 = {required}")]
    LatticeTooShort { half_length: usize, required: f64 },

    #[error("time grid must be ascending, start at t >= 0 and stay within t_max")]
    TimeGrid,

    #[error("quadrature failed to reach tolerance {requested:e}: achieved {achieved:e}")]
    Quadrature { requested: f64, achieved: f64 },

    #[error("generic threshold model has no anomalous exceptional point: Lambda(E_th) = 0")]
    NoAnomalousPoint,

    #[error("no cube-root branch combination solves the cubic (best residual {0:e})")]
    CubeRootBranch(f64),

    #[error("square-root threshold limit not reached: {0}")]
    NoSquareRootLimit(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
