//! Combinatorics of Sturm meanders.
//!
//! A meander is a non-self-intersecting curve crossing a horizontal axis at
//! `N` points, encoded by the permutation that relates the order of the
//! crossings along the curve to their order along the axis. This crate
//! implements the discrete machinery built on that encoding:
//!
//! * validation (dissipative, Jordan, Morse) and the trivial equivalences;
//! * Morse indices and zero numbers by the boundary recursions;
//! * heteroclinic connection graphs through the blocking criterion, with
//!   reversor and graded-isomorphism searches;
//! * the 3-nose family: geometric nest construction, closed-form
//!   permutations, dual equilibrium labelings, Chafee-Infante stacks and
//!   lattices, suspension and nest insertion;
//! * the continued-fraction classification of 3-nose configurations and
//!   the reproduction of the 63-arc table.

// Parity tests read better as `j % 2 == 1` in index arithmetic.
#![allow(clippy::manual_is_multiple_of)]

pub mod cfrac;
pub mod connections;
pub mod error;
pub mod invariants;
pub mod meander;
pub mod permutation;
pub mod three_nose;
pub mod verify;

pub use error::{Error, Result};
pub use meander::{Arc, Meander, Side};
pub use permutation::Permutation;
