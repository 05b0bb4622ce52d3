//! Exact computer algebra for finite-dimensional nilpotent Lie superalgebras.
//!
//! The crate builds, for a nilpotent Lie superalgebra `g` over an exact
//! multi-quadratic extension of the rationals and an even functional `λ`,
//! the full orbit-method tool chain:
//!
//! * PBW normal forms and straightening in the enveloping algebra `U(g)`
//!   ([`pbw`]),
//! * polarizations of `g` at `λ` ([`polarization`]),
//! * truncated induced modules with exact action matrices ([`induced`]),
//! * an explicit morphism from `U(g)` onto a factored Clifford–Weyl algebra
//!   whose kernel is the primitive ideal `I(λ)`, with a membership oracle
//!   and the maximal-ideal split of the underlying algebra ([`dixmier`]),
//! * coadjoint-orbit equivalence tests and stabilizer bounds ([`orbits`]).
//!
//! All arithmetic is exact: coefficients live in a lazily grown tower
//! `Q(sqrt(d1), ..., sqrt(dm))` ([`scalar`]). There is no floating point
//! anywhere in the crate.

#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod dixmier;
pub mod error;
pub mod induced;
pub mod linalg;
pub mod orbits;
pub mod pbw;
pub mod polarization;
pub mod scalar;
pub mod superlie;

pub use error::{Error, Result};
pub use linalg::{EvenBilinearForm, FormSymmetry, GradedSubspace, Matrix, Parity, SuperDim};
pub use scalar::{Scalar, Tower};
pub use superlie::{BmTriple, SuperLieAlgebra};
