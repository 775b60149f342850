//! Row sampling, witness search, moments and Monte-Carlo estimation.

pub mod moments;
pub mod montecarlo;
pub mod rip;
pub mod sampling;
pub mod search;

pub use moments::{
    bound_terms, covariance_ratio, covariance_ratio_direct, first_moment, moment_report,
    variance_ratio_bound, variance_ratio_exact, BoundTerms, MomentReport, VarianceMode,
    VarianceRatio,
};
pub use montecarlo::{
    estimate_count_moments, estimate_existence_probability, estimate_pair_moment, CountMoments,
    ExistenceEstimate, PairEstimate,
};
pub use rip::{non_injectivity_pair, pair_residual, sampled_residual, verify_kernel};
pub use sampling::{sample_mask, SampleMask, SamplingParams};
pub use search::{count_witnesses, find_kernel_witness, WitnessReport};
