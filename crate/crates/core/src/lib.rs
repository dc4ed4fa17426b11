//! Explicit entropic realizations of common submodular set functions.
//!
//! For coverage, facility location, cardinality and weighted truncations,
//! concave-over-modular functions, saturated coverage, monotone graph cuts and
//! modular functions this crate builds random variables `X_1..X_n` whose joint
//! entropies `H(X_A)` equal `f(A)` for every subset `A`, and checks the claim
//! two ways: symbolically with exact rationals over all `2^n` subsets, and
//! numerically by enumerating the joint distribution.
//!
//! | module | contents |
//! |--------|----------|
//! | [`setfn`] | dense tables, polymatroid checks, submodular information measures |
//! | [`zoo`] | direct evaluators for each family |
//! | [`atoms`] | realizations from independent weighted atoms |
//! | [`linear`], [`gf`] | Vandermonde realizations over prime fields |
//! | [`mixture`] | nonnegative combinations, concave decomposition |
//! | [`concretize`] | explicit joint distributions and pmf entropies |
//! | [`generate`] | seeded random instances |
//!
//! Exhaustive scans run on rayon when the `parallel` feature (default) is on;
//! see [`exec::Execution`].

pub mod atoms;
pub mod concretize;
pub mod error;
pub mod exec;
pub mod generate;
pub mod gf;
pub mod linear;
pub mod mixture;
pub mod rational;
pub mod realization;
pub mod setfn;
pub mod zoo;

pub use error::{Error, Result};
pub use exec::Execution;
pub use rational::Rational;
pub use realization::{realize, Realization};
pub use setfn::{GroundSet, Mask, SetFunction, SetFunctionTable};
pub use zoo::FunctionSpec;
