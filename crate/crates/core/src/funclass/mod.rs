//! Sensitivity classes of functions on pairs of words.

pub mod eq;
pub mod function;
pub mod hk;
pub mod sensitivity;

pub use eq::{eq_count, max_eq, max_eq_rate, max_matching};
pub use function::{
    mod_sum_function, mod_sum_params, mod_sum_value, next_prime_above, sum_coordinate_count,
    FunctionFile, ModSumParams, Origin, OutputSymbol, SingleLetterFunction, VectorFunction,
};
pub use hk::{
    column_collision, counterexample_quadruple, hk_violation, is_hk, row_collision,
    symbolwise_totally_sensitive, HkViolation, Injectivity, Quadruple, SymbolwiseVerdict,
};
pub use sensitivity::{
    classify, highly_sensitive_given_x_witness, highly_sensitive_given_y_witness,
    is_highly_sensitive_given_x, is_highly_sensitive_given_y, is_jointly_sensitive,
    is_sensitive_given_x, is_sensitive_given_y, is_totally_sensitive, jointly_sensitive_witness,
    sensitive_given_x_witness, sensitive_given_y_witness, Property, SensitivityReport, Witness,
};

use crate::error::Result;
use crate::words::Budget;

/// Symbol-wise extension of `f` to block length `n`.
pub fn lift_symbolwise(f: &SingleLetterFunction, n: usize) -> Result<VectorFunction> {
    VectorFunction::lift(f, n, Budget::default())
}
