//! Random generation.
//!
//! Matrix samplers are exact constructions from Gaussian and Wishart
//! matrices; spectral configurations, which also exist for `β = 8`, are
//! drawn by random-walk Metropolis. Gaussian coefficients have variance
//! `1/β` throughout.

mod beta;
mod gaussian;
mod mcmc;
mod pearson;
mod rng;

pub use beta::{sample_beta1, BetaFlavor};
pub use gaussian::{
    sample_chi2beta, sample_normal, sample_wishart, sample_wishart_with, standard_normal, WishartMethod,
    WishartParams,
};
pub use mcmc::{sample_spectral, McmcOptions, SpectralChain};
pub use pearson::{
    sample_mmpearson2, sample_mmpearson2_standard, sample_pearson2, sample_pearson2_quotient,
    sample_pearson2_standard, EllipticalGenerator, MmDraw, PearsonConstruction, QuotientDraw, SquareRoot,
};
pub use rng::RngStream;
