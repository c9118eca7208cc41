use serde::{Deserialize, Serialize};

use crate::algebra::{adjoint, cholesky, inverse_hpd, logdet_hpd, matmul, solve_lower, AlgebraTag, DenseMatrix, HermitianPD};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PearsonKind {
    /// Determinant form `|I − RR*|^{β(ν−m+1)/2−1}`.
    Matricvariate,
    /// Trace form `(1 − tr RR*)^{βν/2−1}`.
    MatrixMultivariate,
}

/// Parameters `(ν, μ, 𝔅, 𝔇)` of a Pearson type II law on `m × n` matrices.
///
/// Location-scale conventions follow the two densities:
///
/// - matricvariate: `Q = (M*)⁻¹ R N* + μ` with `𝔅 = MM*`, `𝔇 = NN*`, so the
///   support is `𝔅⁻¹ − (Q−μ)𝔇⁻¹(Q−μ)* > 0`;
/// - matrix multivariate: `Q = (M*)⁻¹ R N⁻¹ + μ`, support
///   `tr 𝔅(Q−μ)𝔇(Q−μ)* < 1`.
#[derive(Clone, Debug)]
pub struct PearsonIIParams {
    kind: PearsonKind,
    nu: f64,
    mu: DenseMatrix,
    scale_left: HermitianPD,
    scale_right: HermitianPD,
    pub(crate) chol_left: DenseMatrix,
    pub(crate) chol_right: DenseMatrix,
    pub(crate) inv_left: HermitianPD,
    pub(crate) inv_right: HermitianPD,
    pub(crate) logdet_left: f64,
    pub(crate) logdet_right: f64,
    /// `(M*)⁻¹`, applied on the left by the affine map.
    pub(crate) left_map: DenseMatrix,
    /// `N*` (matricvariate) or `N⁻¹` (matrix multivariate).
    pub(crate) right_map: DenseMatrix,
}

impl PearsonIIParams {
    pub fn new(
        kind: PearsonKind,
        nu: f64,
        mu: DenseMatrix,
        scale_left: HermitianPD,
        scale_right: HermitianPD,
    ) -> Result<Self> {
        let tag = mu.tag();
        let (m, n) = (mu.rows(), mu.cols());
        if scale_left.tag() != tag || scale_right.tag() != tag {
            return Err(Error::Parameter("location and scales must share one algebra".into()));
        }
        if scale_left.dim() != m || scale_right.dim() != n {
            return Err(Error::Dimension(format!(
                "scales are {}x{} and {}x{} for a {m}x{n} location",
                scale_left.dim(),
                scale_left.dim(),
                scale_right.dim(),
                scale_right.dim()
            )));
        }
        check_nu(kind, tag, m, nu)?;
        let not_pd = |side: &str, e: Error| match e {
            Error::NotPositiveDefinite(msg) => {
                Error::Parameter(format!("{side} scale is not positive definite ({msg})"))
            }
            other => other,
        };
        let chol_left = cholesky(&scale_left).map_err(|e| not_pd("left", e))?;
        let chol_right = cholesky(&scale_right).map_err(|e| not_pd("right", e))?;
        let inv_left = inverse_hpd(&scale_left)?;
        let inv_right = inverse_hpd(&scale_right)?;
        let logdet_left = logdet_hpd(&scale_left)?;
        let logdet_right = logdet_hpd(&scale_right)?;
        let left_map = adjoint(&solve_lower(&chol_left, &DenseMatrix::identity(tag, m)?)?);
        let right_map = match kind {
            PearsonKind::Matricvariate => adjoint(&chol_right),
            PearsonKind::MatrixMultivariate => solve_lower(&chol_right, &DenseMatrix::identity(tag, n)?)?,
        };
        Ok(Self {
            kind,
            nu,
            mu,
            scale_left,
            scale_right,
            chol_left,
            chol_right,
            inv_left,
            inv_right,
            logdet_left,
            logdet_right,
            left_map,
            right_map,
        })
    }

    /// Zero location and identity scales.
    pub fn standard(kind: PearsonKind, tag: AlgebraTag, m: usize, n: usize, nu: f64) -> Result<Self> {
        Self::new(
            kind,
            nu,
            DenseMatrix::zeros(tag, m, n)?,
            HermitianPD::identity(tag, m)?,
            HermitianPD::identity(tag, n)?,
        )
    }

    pub fn kind(&self) -> PearsonKind {
        self.kind
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn mu(&self) -> &DenseMatrix {
        &self.mu
    }

    pub fn scale_left(&self) -> &HermitianPD {
        &self.scale_left
    }

    pub fn scale_right(&self) -> &HermitianPD {
        &self.scale_right
    }

    pub fn tag(&self) -> AlgebraTag {
        self.mu.tag()
    }

    pub fn beta(&self) -> f64 {
        self.tag().beta_f64()
    }

    /// Maps a standardized draw `R` to `(M*)⁻¹ R N* + μ` (matricvariate) or
    /// `(M*)⁻¹ R N⁻¹ + μ` (matrix multivariate).
    pub fn affine_map(&self, r: &DenseMatrix) -> Result<DenseMatrix> {
        matmul(&matmul(&self.left_map, r)?, &self.right_map)?.add(&self.mu)
    }

    pub fn rows(&self) -> usize {
        self.mu.rows()
    }

    pub fn cols(&self) -> usize {
        self.mu.cols()
    }
}

fn check_nu(kind: PearsonKind, tag: AlgebraTag, m: usize, nu: f64) -> Result<()> {
    if !nu.is_finite() {
        return Err(Error::Parameter(format!("nu must be finite, got {nu}")));
    }
    match kind {
        PearsonKind::Matricvariate => {
            let bound = tag.beta_f64() * (m as f64 - 1.0);
            if !(nu > bound) {
                return Err(Error::Parameter(format!(
                    "matricvariate Pearson II needs nu > beta(m-1) = {bound}, got {nu}"
                )));
            }
        }
        PearsonKind::MatrixMultivariate => {
            if !(nu > 0.0) {
                return Err(Error::Parameter(format!("nu must be positive, got {nu}")));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `n ≥ m`: `B = RR*` is `m × m`.
    Wide,
    /// `n < m`: `B̃ = R*R` is `n × n`.
    Tall,
}

/// Parameters of the beta type I laws of `RR*` (or `R*R`) for an `m × n`
/// Pearson type II matrix `R` with `ν` degrees of freedom.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaIParams {
    tag: AlgebraTag,
    m: usize,
    n_dof: f64,
    nu: f64,
    orientation: Orientation,
}

impl BetaIParams {
    /// Orientation is `Wide` when `n ≥ m`. Existence requires
    /// `n > β(m−1)` (wide) or `m > β(n−1)` with integer `n` (tall).
    pub fn new(tag: AlgebraTag, m: usize, n_dof: f64, nu: f64) -> Result<Self> {
        tag.require_associative()?;
        if m == 0 {
            return Err(Error::Dimension("m must be at least 1".into()));
        }
        if !(n_dof > 0.0) || !n_dof.is_finite() || !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::Parameter(format!("n = {n_dof} and nu = {nu} must be positive")));
        }
        let beta = tag.beta_f64();
        let mf = m as f64;
        let orientation = if n_dof >= mf { Orientation::Wide } else { Orientation::Tall };
        match orientation {
            Orientation::Wide => {
                if !(n_dof > beta * (mf - 1.0)) {
                    return Err(Error::Parameter(format!(
                        "beta type I needs n > beta(m-1) = {}, got n = {n_dof}",
                        beta * (mf - 1.0)
                    )));
                }
            }
            Orientation::Tall => {
                if n_dof.fract() != 0.0 {
                    return Err(Error::Parameter(format!(
                        "n < m requires an integer n (it is the size of R*R), got {n_dof}"
                    )));
                }
                if !(mf > beta * (n_dof - 1.0)) {
                    return Err(Error::Parameter(format!(
                        "beta type I with n < m needs m > beta(n-1) = {}, got m = {m}",
                        beta * (n_dof - 1.0)
                    )));
                }
            }
        }
        Ok(Self { tag, m, n_dof, nu, orientation })
    }

    pub fn tag(&self) -> AlgebraTag {
        self.tag
    }

    pub fn beta(&self) -> f64 {
        self.tag.beta_f64()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_dof(&self) -> f64 {
        self.n_dof
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Size of the beta matrix: `m` (wide) or `n` (tall).
    pub fn matrix_dim(&self) -> usize {
        match self.orientation {
            Orientation::Wide => self.m,
            Orientation::Tall => self.n_dof as usize,
        }
    }
}
