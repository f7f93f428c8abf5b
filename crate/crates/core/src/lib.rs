//! Sampling and reconstruction of time-vertex graph signals in the joint
//! time-vertex fractional Fourier domain.
//!
//! The crate is `no_std` and only needs `alloc`. Signals are `N × T` complex
//! matrices whose column-stacked vector uses the flat index `t·N + v`, which
//! matches the Kronecker order `F^α ⊗ F^β` of the joint transform.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bandlimit;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod localized;
pub mod reconstruct;
pub mod select;
pub mod spectral;

pub use error::{Error, Result};
