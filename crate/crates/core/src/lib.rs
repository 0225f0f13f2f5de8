//! Exact successive minima and lattice point counts of 0-symmetric convex
//! bodies, and machine checks of the product bounds that relate them.
//!
//! All arithmetic is exact ([`rational::Rational`] over big integers). The
//! pipeline is: build a [`body::SymmetricBody`] and a [`lattice::Lattice`],
//! compute [`succmin::successive_minima`], count with [`enumerate::count`],
//! and evaluate the bounds in [`bounds`]; [`harness::verify`] runs all of it.

pub mod body;
pub mod bounds;
pub mod enumerate;
pub mod error;
pub mod format;
pub mod gauge;
pub mod harness;
pub mod lattice;
pub mod matrix;
pub mod rational;
pub mod rng;
pub mod succmin;

#[cfg(test)]
mod testgen;

pub use body::{BodyKind, Shape, SymmetricBody};
pub use error::{Error, Result};
pub use gauge::GaugeValue;
pub use lattice::{Lattice, Sublattice};
pub use matrix::Matrix;
pub use rational::{Integer, Rational};
