//! Open-loop Stackelberg equilibrium solver for a three-tier supply chain
//! in which a supplier (leader), a manufacturer and a retailer co-invest in
//! corporate social responsibility over a finite horizon.
//!
//! The game is solved along two independent routes that are checked against
//! each other:
//!
//! * [`sweep`] — backward Riccati recursion for the pair `(S_k, g_k)` of the
//!   linear ansatz `p~_k = S_k x~_k - g_k`, followed by a forward pass.
//! * [`oracle`] — the whole coupled forward/backward affine system stacked
//!   into one dense linear system and solved directly.
//!
//! The affine system itself is assembled in [`hmatrix`] by numerically
//! probing the first-order-condition chain of [`foc`]; [`economics`]
//! evaluates per-member profits along any trajectory and against the
//! no-investment baseline.

pub mod cli;
pub mod economics;
pub mod foc;
pub mod hmatrix;
pub mod model;
pub mod oracle;
pub mod sweep;

use num_traits::FromPrimitive;

/// Scalar type the solver is generic over: `f32` or `f64` in practice.
pub trait Scalar: nalgebra::RealField + FromPrimitive + Copy {}
impl<T> Scalar for T where T: nalgebra::RealField + FromPrimitive + Copy {}

/// Shorthand for lifting an `f64` literal into the working scalar type.
pub(crate) fn lit<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("literal not representable in scalar type")
}

/// Concrete aliases for the common case.
pub type ModelParams64 = model::ModelParams<f64>;
pub type GameMatrices64 = hmatrix::GameMatrices<f64>;
pub type Trajectory64 = sweep::Trajectory<f64>;
pub type ProfitSeries64 = economics::ProfitSeries<f64>;

pub type ModelParams32 = model::ModelParams<f32>;
pub type GameMatrices32 = hmatrix::GameMatrices<f32>;
pub type Trajectory32 = sweep::Trajectory<f32>;
pub type ProfitSeries32 = economics::ProfitSeries<f32>;

/// Errors shared across the solver modules.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A model parameter violates an invariant. The message names every
    /// violated invariant.
    #[error("invalid parameters: {0}")]
    Domain(String),

    /// The forward and backward affine maps extracted from the first-order
    /// conditions disagree on the shared `A` block.
    #[error("forward/backward maps disagree on the A block: {0}")]
    Ansatz(String),

    /// `I - B S_{k+1}` became numerically singular at step `k` of the sweep.
    #[error("sweep matrix I - B*S is singular at step {0}")]
    SingularSweep(usize),

    /// The stacked direct system lost a pivot during factorization.
    #[error("stacked system is singular (pivot {0})")]
    SingularSystem(usize),

    /// Two objects with different horizons were combined.
    #[error("horizon mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

pub type Result<V> = std::result::Result<V, Error>;
