//! Distributed codes, their constructions, and exact error accounting.

pub mod binning;
pub mod bits;
pub mod bounds;
pub mod code;
pub mod error_prob;
pub mod km;
pub mod moddev;
pub mod pairing;
pub mod typical;

pub use binning::{
    adapted_length, build_full_side_sw, build_random_binning_sw, expected_binning_error,
    expected_full_side_error, length_allowance, BinningOutcome,
};
pub use bits::{
    elias_int_decode, elias_int_encode, elias_len, is_prefix_free, kraft_sum, BitString,
};
pub use bounds::{atypicality_bounds, BoundKind, BoundReport, Hypotheses};
pub use code::{
    binning_side_information_code, fixed_length_index, map_decoder, random_code,
    random_prefix_code, DistributedCode, RandomCodeOptions,
};
pub use error_prob::{
    error_probability_exact, error_probability_mc, error_probability_table, monte_carlo,
    wilson_interval, McEstimate,
};
pub use km::{km_error_mc, min_error_fixed_length, sum_law, BlockSummary, KmCode};
pub use moddev::{moderate_deviation_run, v_schedule_cap, ScalingRow, ScalingTable};
pub use pairing::{
    pairing_check, pairing_construction, PairingCheck, PairingMode, PairingTranscript,
};
pub use typical::{typical_masses, v_bound, v_count, ProbTables, TypicalMasses, TypicalSetConfig};
