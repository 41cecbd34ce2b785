//! Fourier pricing of European options under exponential Lévy models, with a
//! computable error bound attached to every price and parameter selection by
//! minimizing that bound.

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod error_bounds;
pub mod levy_models;
pub mod optimizer;
pub mod payoffs;
pub mod reference_oracles;
pub mod special_math;
pub mod transform_pricer;

pub use error::{Error, Result};
