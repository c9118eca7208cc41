//! Matricvariate and matrix multivariate Pearson type II and beta type I
//! distributions over the real normed division algebras.
//!
//! The algebra parameter `β` is the real dimension of the scalar field:
//! 1 (real), 2 (complex), 4 (quaternion) or 8 (octonion). Matrix-level
//! arithmetic, densities and samplers support `β ≤ 4`; the spectral
//! densities and the special functions accept any real `β > 0`, which
//! includes the octonion case.
//!
//! Module map:
//!
//! - [`algebra`]: scalars, dense matrices, Cholesky, Hermitian eigenvalues, SVD.
//! - [`special`]: log-domain multivariate gamma/beta and Stiefel volumes.
//! - [`densities`]: closed-form log-densities, including the singular value
//!   and eigenvalue joint densities.
//! - [`samplers`]: exact constructive samplers and a Metropolis sampler for
//!   spectral configurations.
//! - [`verify`]: quadrature and Monte Carlo oracles, KS tests, suite runner.
//! - [`cli`]: the `matvar` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod cli;
pub mod densities;
mod error;
pub mod samplers;
pub mod special;
pub mod verify;

pub use error::{Error, Result};

/// Version string recorded in every emitted file header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Version of the JSON/JSONL interchange formats.
pub const FORMAT_VERSION: u32 = 1;
