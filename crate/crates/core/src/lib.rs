//! Exact arithmetic for quaternion orders and the finite-level objects
//! attached to abelian surfaces with quaternionic multiplication.

pub mod arith;
pub mod cm;
pub mod cohomology;
pub mod cosets;
pub mod error;
pub mod fixtures;
pub mod group;
pub mod hilbert;
pub mod lattice;
pub mod level;
pub mod linalg;
pub mod moduli;
pub mod order;
pub mod projective;
pub mod quat;
pub mod rational;
pub mod selftest;

pub use error::{Error, ParseError, Result};
pub use quat::{QuatAlgebra, QuatElement};
pub use rational::Rational;
