//! Douglas–Rachford splitting for the sum of a Lipschitz-continuous monotone
//! operator and a strongly monotone operator.
//!
//! The crate provides four layers that build on each other:
//!
//! - [`quadform`]: operator properties (strong monotonicity, Lipschitz
//!   continuity, cocoercivity, averagedness) encoded as 2×2 quadratic-form
//!   inequalities on operator graphs, with congruence transforms between
//!   operator, resolvent, and reflected-resolvent coordinates.
//! - [`operators`]: concrete finite-dimensional monotone operators with
//!   closed-form resolvents (dense linear, skew product-space, rotations,
//!   convex quadratic gradients, scaled identity plus normal cone of a
//!   subspace), validated against their claimed properties at construction.
//! - [`rates`]: closed-form linear contraction factors for the
//!   Douglas–Rachford operator under each property combination, step-length
//!   scaling, golden-section step-length optimization, and a sharpness
//!   oracle built from an explicit 2×2 worst-case instance.
//! - [`engine`]: the Douglas–Rachford iteration itself (both compositions),
//!   with iterate traces, shadow sequences, and empirical rate estimation.
//! - [`primal_dual`]: the product-space reformulation of
//!   `min f(x) + g(Lx)` for quadratic `f`, `g` as a skew + strongly monotone
//!   inclusion, solved by the engine with a certified contraction rate.
//! - [`verify`]: a machine-checkable catalog of every matrix identity and
//!   sampled operator inequality that underpins the rate formulas.
//!
//! All computation is finite-dimensional over `f64`; vectors and matrices
//! are [`nalgebra`] dynamic types.

pub mod engine;
pub mod operators;
pub mod primal_dual;
pub mod quadform;
pub mod rates;
pub mod verify;

/// Dense column vector over `f64`; the finite-dimensional realization of a
/// point in the underlying real Hilbert space.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix over `f64`.
pub type Matrix = nalgebra::DMatrix<f64>;

pub use engine::{DRConfig, IterationTrace, Order, RateFit, RunResult};
pub use operators::{OperatorKind, OperatorSpec};
pub use primal_dual::{CompositeProblem, PDSolution};
pub use quadform::{GraphSample, PropertyTag, QuadForm2};
pub use rates::{GammaSweepResult, RateCase, RateReport};
