//! Random compositions and widths, tail bounds, high-precision numbers and
//! inequality certificates.

pub mod bounds;
pub mod certificate;
pub mod real;
pub mod sampling;
pub mod tinylog;

pub use bounds::{
    binomial_tail, chernoff_exp_sum, chernoff_rate, expected_splits_bound, gamma2_cdf, trivial_bounds,
    width_survival, TrivialBounds,
};
pub use certificate::{certify, certify_all, Certificate, Comparison, Direction, CERTIFICATE_NAMES};
pub use real::Real;
pub use sampling::{
    empirical_width_tail, ks_distance, sample_composition, sample_simplex, scaled_width_samples,
    simulate_compositions, simulate_widths, width_shortfall_rate, CompositionSummary, GapProfile,
    SimplexSample, WidthRecord, WidthTail,
};
pub use tinylog::TinyLog;
