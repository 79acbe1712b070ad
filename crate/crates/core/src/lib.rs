//! Evaluation backends and descent local searches for the column permutation
//! problem on binary matrices with the consecutive-ones property.
//!
//! A permuted matrix `Q` closes every row into a single block of ones: any zero
//! lying between two ones of a row is counted as a one (a fill-in). The
//! objective of a permutation is the largest column sum of `Q`; the search
//! goal is a permutation minimizing it. This models the Minimization of Open
//! Stacks Problem (rows are customer orders, columns are products) and the
//! Gate Matrix Layout Problem (rows are nets, columns are gates).
//!
//! Three interchangeable evaluators are provided:
//!
//! * [`exact`]: builds `Q` and scans it completely (`Θ(nm)` per call).
//! * [`indirect`]: one sweep over per-column nonzero lists with open-row
//!   bookkeeping.
//! * [`delta`]: per-stage bitsets of leading, trailing, intermediate and
//!   fill-in ones, updated with word-level Boolean kernels on adjacent column
//!   swaps.
//!
//! [`search`] drives all three through the same seeded descent procedures, so
//! trajectories (and therefore final solutions) are identical across backends.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bitset;
pub mod delta;
mod error;
pub mod exact;
pub mod fixtures;
pub mod indirect;
pub mod instance;
pub mod matrix;
pub mod rng;
pub mod search;

pub use error::Error;
pub use instance::{Instance, Permutation};
pub use matrix::BinaryMatrix;

pub type Result<T, E = Error> = core::result::Result<T, E>;
