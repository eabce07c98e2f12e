//! Exact-arithmetic machinery for one-parameter families of hypersurfaces
//! `w_1 X_1^d + ... + w_n X_n^d - d λ X_1^{w_1} ... X_n^{w_n} = 0`.
//!
//! The crate computes, for every character component `V` of such a family,
//!
//! * the annihilating differential operators `P'(V, W)` and `P(V, W)` in
//!   `D = λ d/dλ`, together with their hypergeometric form on the descent
//!   coordinate `t = λ^{-d}` ([`operators`]);
//! * an independent verification that these operators really kill the
//!   associated cohomology class, by symbolic pole-order reduction in the
//!   Jacobian ring ([`oracle`]);
//! * deformation matrices `A(λ)` with `A(0) = I` from hypergeometric series
//!   solutions, including the basis correction needed when the cyclic
//!   derivative basis degenerates at `λ = 0`, and Frobenius matrices
//!   `F(λ) = A(λ)^{-1} F(0) A(λ^p)` with exact horizontality checks
//!   ([`deformation`]).
//!
//! All computation is exact: big rationals, dense truncated power series,
//! univariate rational functions and homogeneous multivariate polynomials.
//! There is no floating-point fallback.
//!
//! The `examples/` directory contains one runnable program per capability;
//! the `dwork-pf` binary exposes the same pipeline as CLI subcommands with
//! machine-readable JSON output.

pub mod deformation;
pub mod error;
pub mod family;
pub mod linalg;
pub mod multipoly;
pub mod operators;
pub mod oracle;
pub mod padic;
pub mod poly;
pub mod rational;
pub mod ratfun;
pub mod schema;
pub mod series;

pub use error::{ArithError, DeformationError, FamilyError, OracleError};
pub use family::{CharVector, FamilyData};
pub use operators::{CompanionMatrix, DiffOperator, HypParams, Var};
pub use rational::Rational;
pub use ratfun::RationalFunction;
pub use series::TruncSeries;
