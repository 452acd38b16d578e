//! Emitter coupled at the lower band edge of a 1-D tight-binding chain.
//!
//! The crate computes the exact discrete spectrum (bound, virtual, resonant
//! and anti-resonant states), locates the ordinary and anomalous exceptional
//! points, checks the Jordan structure of the threshold limit in exact
//! arithmetic, and evaluates the survival amplitude of the emitter by a
//! finite-lattice oracle, a Bessel-integral representation and asymptotic laws.
//!
//! Units: hopping `J = 1`, lattice constant 1, `hbar = 1`.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases at the crate root fix the scalar to `f64`.

// `!(x > y)` is the NaN-rejecting form; matrix code indexes by row and column.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::excessive_precision)]

pub mod dynamics;
pub mod ep;
pub mod error;
pub mod fit;
pub mod generic;
pub mod jordan;
pub mod lattice;
pub mod model;
pub mod poly;
pub mod puiseux;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod spectrum;
mod twofold;

pub use error::{Error, Result};
pub use model::{
    density_of_states, effective_hamiltonian, energy_from_lambda, lambda_from_energy, self_energy, ModelParams,
    Sheet,
};
pub use scalar::{Cplx, Real};

pub type ModelParams64 = ModelParams<f64>;
pub type Complex64 = Cplx<f64>;
