//! Exact determinant bounds for perturbations of the identity matrix.
//!
//! Everything certified is computed in exact rational arithmetic: the
//! closed-form bound catalogue, the extremal constructions that attain
//! them, an exhaustive symmetry-reduced search for the maximal determinant
//! polynomial of unit-diagonal ±ε matrices, and a verification harness that
//! samples exact rationals so no float tolerance can blur an inequality.
//!
//! All types are immutable values after construction and every operation is
//! a pure function, so the whole crate is safe to use from concurrent
//! contexts.

pub mod bounds;
pub mod cli;
pub mod construct;
pub mod envelope;
pub mod error;
pub mod fredholm;
pub mod matrix;
pub mod pattern;
pub mod poly;
pub mod rational;
pub mod roots;
pub mod search;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{det_rational, det_symbolic, DenseMatrix};
pub use poly::EpsPolynomial;
pub use rational::Rational;
