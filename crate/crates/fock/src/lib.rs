//! Numerical machinery for weighted Fock spaces and linear complex ODEs.
//!
//! The crate evaluates, at desk scale, the objects that appear in the growth
//! theory of the equation
//!
//! ```text
//! f^(k) + A_{k-1} f^(k-1) + ... + A_1 f' + A_0 f = A_k
//! ```
//!
//! with entire coefficients: radial weights `phi` and their rapidly-increasing
//! class ([`weights`]), exact entire-function algebra ([`entire`]), planar and
//! segment quadrature for every norm in play ([`quadrature`]), the monomial
//! reproducing kernel of the weighted square-integrable space ([`kernel`]),
//! series and ray solvers with growth envelopes ([`ode`]), and the hypothesis
//! checkers T1.1–T1.8 with their conclusion probes ([`conditions`]).
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live in
//! the companion `fock-cli` crate.
//!
//! Numerical verdicts are data: a weighted-norm quadrature that stops
//! converging reports a divergence diagnosis rather than an error, because
//! "not in the space" is a result.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod conditions;
pub mod entire;
pub mod error;
pub mod kernel;
pub mod ode;
pub mod quadrature;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
