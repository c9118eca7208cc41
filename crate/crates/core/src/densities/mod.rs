//! Closed-form log-densities.
//!
//! Evaluators are total on the ambient space: a point outside the support
//! gives `f64::NEG_INFINITY`, while malformed parameters are errors. The
//! spectral densities are the exception; there the ordering and range of
//! the arguments is a precondition and violations are [`Error::Support`].
//!
//! [`Error::Support`]: crate::Error::Support

mod matrix;
mod params;
mod spectral;

pub use matrix::{beta1_logpdf, mmbeta1_logpdf, mmpearson2_logpdf, pearson2_logpdf, pearson2_logpdf_dual};
pub use params::{BetaIParams, Orientation, PearsonIIParams, PearsonKind};
pub use spectral::{
    change_of_variables_check, spectral_logpdf, spectral_logpdf_with, PiExponent, SpectralConfig,
    SpectralDensity, SpectralFlavor,
};
