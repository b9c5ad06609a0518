//! Tools for distributed computation of a function of two correlated
//! sources: sensitivity classes of functions, smoothness of sources,
//! rate-region bounds, and constructions that turn a code for a function
//! into a Slepian-Wolf code.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod codes;
pub mod error;
pub mod funclass;
pub mod regions;
pub mod sources;
pub mod words;

pub use error::{Error, Result};
pub use words::{Budget, WordSpace};
