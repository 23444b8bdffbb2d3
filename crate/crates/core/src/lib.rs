//! Topological pressure dimensions of almost additive potential sequences.
//!
//! The crate computes and estimates the four s-pressures `PD_1 .. PD_4`
//! (lower cover, spanning, separated, upper cover) and their critical
//! exponents on a handful of model systems: full shifts and subshifts of
//! finite type with the dyadic metric, the doubling map and rigid rotations
//! of the circle, and contractions of the unit interval.
//!
//! The layers, bottom up:
//!
//! * [`systems`]: points, maps, metrics, Bowen metrics, candidate sets and
//!   factor maps.
//! * [`potentials`]: almost additive sequences and their algebra.
//! * [`partition`]: separated/spanning set partition functions, greedy
//!   bounds and exhaustive oracles, finite cover sums.
//! * [`symbolic`]: exact cylinder calculus on shifts.
//! * [`dimension`]: growth tables, s-pressure proxies, jump classification
//!   and dimension estimates.
//! * [`theorems`]: the verification harness.
//! * [`cli`]: the configuration-driven front end behind the `pdim` binary.

pub mod cli;
pub mod dimension;
pub mod error;
pub mod numeric;
pub mod partition;
pub mod potentials;
pub mod symbolic;
pub mod systems;
pub mod theorems;

pub use error::{Error, Result};
