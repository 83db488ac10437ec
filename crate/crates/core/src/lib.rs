//! Numerical laboratory for 2-inner product spaces built on the
//! Gram-determinant model `(x,y|z) = <x,y><z,z> - <x,z><z,y>`.
//!
//! The crate evaluates every reverse bound chain for the
//! Cauchy-Bunyakovsky-Schwarz inequality in this setting, term by term and
//! with full diagnostics, reproduces the extremal constructions that attain
//! the sharp constants, and applies the finite-dimensional machinery to
//! weighted-integral determinant inequalities via composite Gauss-Legendre
//! quadrature over parsed function expressions.
//!
//! Module map:
//! - [`linalg`]: scalars, small dense vectors, weighted inner products.
//! - [`two_inner`]: the 2-inner product, 2-norm, polarization, axiom audit.
//! - [`reverses`]: localization conditions, exact identities, bound chains.
//! - [`sharpness`]: extremal witnesses and empirical sharp-constant search.
//! - [`funcspace`]: expression parsing, quadrature, integral 2-inner products.
//! - [`cli`]: the `gramlab` command-line surface.

pub mod cli;
mod error;
pub mod funcspace;
pub mod fuzz;
pub mod linalg;
mod numeric;
pub mod reverses;
pub mod sampling;
pub mod sharpness;
pub mod two_inner;

pub use error::{Error, Result};
pub use linalg::{Mode, Scalar, Vector, WeightedInnerSpace};
pub use two_inner::TwoInnerSpace;

/// Default relative comparison tolerance.
///
/// Every inequality verdict compares computed doubles; all chain members are
/// polynomial in the inputs, so 1e-9 relative to the largest participating
/// magnitude leaves several orders of headroom above rounding noise.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default deterministic seed used by the CLI.
pub const DEFAULT_SEED: u64 = 42;
