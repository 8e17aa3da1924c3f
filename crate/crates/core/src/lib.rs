//! Exact linear-algebraic dynamics of surjective endomorphisms.
//!
//! The crate covers toric fans and their equivariant endomorphisms, the
//! induced pullback on divisor class groups, the endomorphism-algebra model
//! of abelian surfaces with `End ⊗ Q = M_2(Q)`, and height-based estimates of
//! arithmetic degrees on products of projective spaces and elliptic curves.

pub mod abelian;
pub mod error;
pub mod fan;
pub mod heights;
pub mod polyhedral;
pub mod rational;
pub mod ratmat;
pub mod toric_divisors;
pub mod toric_endo;

pub use error::{Error, ErrorKind, Result};
pub use rational::Rational;
