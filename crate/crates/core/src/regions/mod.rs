//! Entropy quantities and rate-region bounds.

pub mod entropy;
pub mod markov;
pub mod region;
pub mod spectral;

pub use entropy::{entropy, h2, h2_inverse, table_entropies};
pub use region::{
    field_sum_entropy, mod_sum_regions, outer_bound_r_sensitive, region_from, shannon_region,
    sw_rate_full_side, sw_region_fl, sw_region_vl, ModSumRegions, RateRegion, REGION_TOL,
};
pub use spectral::{empirical_spectrum, spectral_entropies, SpectralEntropies};
