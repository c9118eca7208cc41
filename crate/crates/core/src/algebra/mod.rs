//! Scalars and dense linear algebra over ℝ, ℂ, ℍ (and octonion scalars).
//!
//! Coefficients are stored on the basis `(1, i, j, k, …)` in Cayley–Dickson
//! order with `ij = k`. Matrix arithmetic is restricted to the associative
//! algebras (`β ≤ 4`); eigenvalue and singular value computations for
//! quaternion matrices go through the complex adjoint embedding.

mod json;
mod linalg;
mod matrix;
mod scalar;

pub use json::MatrixJson;
pub use linalg::{
    cholesky, complex_embed, herm_eigen, herm_eigenvalues, inverse_hpd, logdet_hpd,
    logdet_if_pd, solve_lower, solve_lower_adjoint_right, svd, SvdResult, PD_RELATIVE_TOL,
    SINGULAR_TIE_TOL,
};
pub use matrix::{adjoint, gram, gram_adjoint, matmul, DenseMatrix, HermitianPD};
pub(crate) use linalg::scale_rows;
pub use scalar::{mul_scalars, DivisionScalar};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which normed division algebra a value lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum AlgebraTag {
    Real,
    Complex,
    Quaternion,
    Octonion,
}

impl AlgebraTag {
    pub const ALL: [AlgebraTag; 4] = [
        AlgebraTag::Real,
        AlgebraTag::Complex,
        AlgebraTag::Quaternion,
        AlgebraTag::Octonion,
    ];

    pub fn from_beta(beta: u32) -> Result<Self> {
        match beta {
            1 => Ok(AlgebraTag::Real),
            2 => Ok(AlgebraTag::Complex),
            4 => Ok(AlgebraTag::Quaternion),
            8 => Ok(AlgebraTag::Octonion),
            other => Err(Error::Parameter(format!(
                "beta must be one of 1, 2, 4, 8 (got {other})"
            ))),
        }
    }

    /// Real dimension `β`.
    pub fn beta(self) -> usize {
        match self {
            AlgebraTag::Real => 1,
            AlgebraTag::Complex => 2,
            AlgebraTag::Quaternion => 4,
            AlgebraTag::Octonion => 8,
        }
    }

    pub fn beta_f64(self) -> f64 {
        self.beta() as f64
    }

    /// Fails for the octonions, where matrix products are not associative.
    pub fn require_associative(self) -> Result<()> {
        if self == AlgebraTag::Octonion {
            Err(Error::Unsupported(
                "octonion matrix arithmetic is not supported (beta = 8)".into(),
            ))
        } else {
            Ok(())
        }
    }
}

impl TryFrom<u32> for AlgebraTag {
    type Error = Error;

    fn try_from(beta: u32) -> Result<Self> {
        AlgebraTag::from_beta(beta)
    }
}

impl From<AlgebraTag> for u32 {
    fn from(tag: AlgebraTag) -> u32 {
        tag.beta() as u32
    }
}

impl std::fmt::Display for AlgebraTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "beta={}", self.beta())
    }
}

/// Quaternion coefficients used as the working scalar for all matrix
/// arithmetic; real and complex entries keep their unused slots at zero.
pub(crate) type Quat = [f64; 4];

pub(crate) const QZERO: Quat = [0.0; 4];

#[inline]
pub(crate) fn qmul(a: &Quat, b: &Quat) -> Quat {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

#[inline]
pub(crate) fn qconj(a: &Quat) -> Quat {
    [a[0], -a[1], -a[2], -a[3]]
}

#[inline]
pub(crate) fn qadd(a: &Quat, b: &Quat) -> Quat {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

#[inline]
pub(crate) fn qsub(a: &Quat, b: &Quat) -> Quat {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

#[inline]
pub(crate) fn qscale(a: &Quat, s: f64) -> Quat {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

#[inline]
pub(crate) fn qnorm_sqr(a: &Quat) -> f64 {
    a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]
}
