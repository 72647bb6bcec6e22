//! Scalar products of Bethe states on finite inhomogeneous XXX/XXZ spin-1/2
//! chains.
//!
//! The crate builds everything from one primitive, the two-site exchange
//! matrix, and keeps two independent routes to every quantity:
//!
//! * brute-force operators on the full `2^N`-dimensional space
//!   ([`tensor`], [`model`], [`oracle`], [`factorizing`]), and
//! * closed determinant and subset-sum formulas ([`determinant`],
//!   [`column_reduction`]).
//!
//! The test suites hold the two routes against each other; the `acceptance`
//! integration test runs the full battery with fixed seeds and tolerances.

pub mod column_reduction;
pub mod determinant;
pub mod error;
pub mod factorizing;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod sampling;
pub mod tensor;

pub use error::{Error, Result};
pub use model::{ModelParams, MonodromyEntry, OperatorLabel, Variant};
pub use tensor::{StateVector, TwoSiteSMatrix};
