//! Source models and their smoothness properties.

pub mod model;
mod prob_serde;
pub mod smoothness;
pub mod two_symbolwise;

pub use model::{anti_diagonal_letter, pmf_table, MixtureComponent, SourceModel};
pub use smoothness::{
    closed_form_q, is_smooth_iid, is_weakly_smooth_iid, smoothness_check, weak_smoothness_check,
    SmoothnessVerdict, WeakSmoothness,
};
pub use two_symbolwise::{two_symbolwise_from_function, TwoSymbolwiseTemplate};

use crate::error::Result;

/// Probability of a block pair under `source`.
pub fn block_pmf(source: &SourceModel, x: &[usize], y: &[usize]) -> Result<f64> {
    source.block_pmf(x, y)
}
