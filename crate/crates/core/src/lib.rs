//! Convex polytope peeling with independent certification, plus a symbolic
//! replay of the exponent-lattice argument that consumes the peeling.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is computed in
//! `f64` with an explicit tolerance threaded through every predicate; the
//! companion `peelkit` crate carries file formats, rendering and the CLI.
//!
//! Layout:
//! - [`geometry`]: affine hulls, V/H polytopes, cuts, balls, sphere nets.
//! - [`peel`]: the staged cap-peeling decomposition and its certifier.
//! - [`lattice`]: exponent vectors, coefficient tags and the depth calculus.
//! - [`sim`]: graded supports, the staged proof simulator and the brute-force
//!   expansion oracle.

#![no_std]

extern crate alloc;

pub mod error;
pub mod geometry;
pub mod lattice;
pub mod peel;
pub mod sim;

mod math;
mod rng;

pub use error::{Error, Result};

/// Default global tolerance used by constructors and predicates.
pub const DEFAULT_TOL: f64 = 1e-9;
