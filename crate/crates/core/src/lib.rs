//! Calculus of fuzzy n-cell number-valued functions on discretized level
//! grids, with sample-based verifiers for fuzzy optimality conditions.
//!
//! - [`levelsets`]: the number type, arithmetic, `D_L`, partial order and
//!   the g-difference.
//! - [`expr`] and [`funcspace`]: endpoint expressions and fuzzy functions.
//! - [`calculus`]: directional/partial derivatives and gradients.
//! - [`subdiff`]: subgradient certificates and 1-D subdifferential boxes.
//! - [`optimize`]: global-minimum, KKT, Lagrangian dual and composite checks.

pub mod calculus;
pub mod certificate;
pub mod error;
pub mod expr;
pub mod funcspace;
pub mod levelsets;
pub mod optimize;
pub mod sampling;
pub mod subdiff;

pub use certificate::{Certificate, Status, Witness};
pub use error::{FuzzyError, Result};
pub use funcspace::{FuzzyFunction, FuzzyMatrix};
pub use levelsets::{FuzzyNCell, FuzzyVector, LevelGrid};

/// Absolute tolerance for every endpoint inequality.
pub const TAU_ORD: f64 = 1e-9;

/// Convergence threshold for Richardson estimates and side agreement, in `D_L`.
pub const DELTA_CONV: f64 = 1e-6;

/// Complementarity tolerance for KKT checks, in `D_L`.
pub const TAU_KKT: f64 = 1e-8;

/// Endpoint margin required for strict (Slater) feasibility.
pub const SLATER_MARGIN: f64 = 1e-6;
