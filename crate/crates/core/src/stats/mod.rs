//! Correlation functions, degree histograms, power-law fits and
//! distribution distances.

mod correlation;
mod histogram;
mod ks;
mod powerlaw;
mod series;

pub use correlation::{
    correlation_function, correlation_length, rescale_correlation, CorrelationFunction,
    CorrelationLength,
};
pub use histogram::{log_bin_edges, log_binned_histogram, DegreeHistogram, DEFAULT_BIN_RATIO};
pub use ks::{ks_critical_value, ks_distance, ks_matrix, DistributionDistance};
pub use powerlaw::{
    fit_power_law, sample_discrete_power_law, PowerLawFit, MIN_FIT_BINS, MIN_FIT_DECADES,
    MIN_FIT_R2,
};
pub use series::blocked_mean;
