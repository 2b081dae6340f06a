//! Complex-valued Kuramoto networks: linear embedding, feedback laws driving
//! the embedding onto the unit torus, and tools to compare it against the
//! classical phase model.

// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod metrics;
pub mod network;
pub mod output;
pub mod rng;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
