//! Numerical oracles and statistical tests.
//!
//! Normalizing constants are checked by adaptive Gauss–Legendre quadrature
//! in one or two dimensions and by uniform Monte Carlo over a bounding
//! region; samplers by one- and two-sample Kolmogorov–Smirnov tests with
//! asymptotic p-values. [`run_suite`] runs a configured list of checks in
//! parallel and collects a JSON-serializable report.

mod mc;
mod quadrature;
mod stats;
mod suite;

pub use mc::{mc_normalize, McRegion};
pub use quadrature::{quadrature_cdf, quadrature_normalize, Domain, Integrator, NormalizationEstimate, NormalizationMethod};
pub use stats::{kolmogorov_survival, ks_sorted, ks_test, ks_two_sample, pearson_correlation, KsOutcome, KS_MIN_SAMPLES};
pub use suite::{
    affine_error, change_of_variables_error, duality_error, gamma_integral, run_suite, splitmix64, ConstructionParams,
    IdentityParams, MatrixParams, ScalarParams, SpectralDirectParams, SpectralParams, SuiteConfig, SuiteReport,
    TestReport, TestSpec, TraceStatistic,
};
