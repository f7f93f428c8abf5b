//! File formats, configuration and experiment harness around `tvfrft-core`.

// `!(x >= 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod harness;
pub mod io;
pub mod plan;
pub mod table;

pub use tvfrft_core;
