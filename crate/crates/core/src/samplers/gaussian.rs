use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::algebra::{cholesky, gram, matmul, AlgebraTag, DenseMatrix, HermitianPD};
use crate::{Error, Result};

/// `m × n` matrix of independent standardized Gaussians: each of the `β`
/// real coefficients of an entry has mean 0 and variance `1/β`, so
/// `E|z|² = 1`.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R, tag: AlgebraTag, m: usize, n: usize) -> Result<DenseMatrix> {
    let mut z = DenseMatrix::zeros(tag, m, n)?;
    let beta = tag.beta();
    let sd = (1.0 / beta as f64).sqrt();
    for q in z.quats_mut() {
        for c in q.iter_mut().take(beta) {
            let x: f64 = StandardNormal.sample(rng);
            *c = sd * x;
        }
    }
    Ok(z)
}

/// `L_σ Z L_θ*` for standardized `Z` and Cholesky factors of the row and
/// column scales.
pub fn sample_normal<R: Rng + ?Sized>(
    rng: &mut R,
    sigma_left: &HermitianPD,
    theta_right: &HermitianPD,
) -> Result<DenseMatrix> {
    let tag = sigma_left.tag();
    if theta_right.tag() != tag {
        return Err(Error::Parameter("row and column scales must share one algebra".into()));
    }
    let l = cholesky(sigma_left)?;
    let r = cholesky(theta_right)?;
    let z = standard_normal(rng, tag, sigma_left.dim(), theta_right.dim())?;
    matmul(&matmul(&l, &z)?, &crate::algebra::adjoint(&r))
}

/// `χ^{2,β}(ν)`, i.e. Gamma with shape `βν/2` and rate `β/2`; its mean is `ν`.
pub fn sample_chi2beta<R: Rng + ?Sized>(rng: &mut R, beta: f64, nu: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Parameter(format!("chi-square degrees of freedom must be positive, got {nu}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
    }
    let g = Gamma::new(beta * nu / 2.0, 2.0 / beta).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(g.sample(rng))
}

/// Wishart law `𝒲_m^β(ν, Σ)`: the law of `L_Σ Z Z* L_Σ*` for a standardized
/// `m × ν` Gaussian `Z` when `ν` is an integer, so `E U = νΣ`.
#[derive(Clone, Debug)]
pub struct WishartParams {
    nu: f64,
    sigma: HermitianPD,
    chol: DenseMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WishartMethod {
    /// Gram for integer `ν`, Bartlett otherwise.
    Auto,
    Gram,
    Bartlett,
}

impl WishartParams {
    pub fn new(nu: f64, sigma: HermitianPD) -> Result<Self> {
        let beta = sigma.tag().beta_f64();
        let m = sigma.dim() as f64;
        if !nu.is_finite() || !(nu > beta * (m - 1.0)) || !(nu > 0.0) {
            return Err(Error::Parameter(format!(
                "Wishart needs nu > beta(m-1) = {}, got {nu}",
                beta * (m - 1.0)
            )));
        }
        let chol = cholesky(&sigma).map_err(|e| Error::Parameter(format!("Wishart scale: {e}")))?;
        Ok(Self { nu, sigma, chol })
    }

    pub fn standard(tag: AlgebraTag, m: usize, nu: f64) -> Result<Self> {
        Self::new(nu, HermitianPD::identity(tag, m)?)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn sigma(&self) -> &HermitianPD {
        &self.sigma
    }

    pub fn tag(&self) -> AlgebraTag {
        self.sigma.tag()
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }
}

pub fn sample_wishart<R: Rng + ?Sized>(rng: &mut R, p: &WishartParams) -> Result<HermitianPD> {
    sample_wishart_with(rng, p, WishartMethod::Auto)
}

pub fn sample_wishart_with<R: Rng + ?Sized>(
    rng: &mut R,
    p: &WishartParams,
    method: WishartMethod,
) -> Result<HermitianPD> {
    let integer = p.nu.fract() == 0.0 && p.nu <= 1e6;
    let factor = match method {
        WishartMethod::Gram if !integer => {
            return Err(Error::Parameter(format!("Gram construction needs integer nu, got {}", p.nu)));
        }
        WishartMethod::Gram => standard_normal(rng, p.tag(), p.dim(), p.nu as usize)?,
        WishartMethod::Auto if integer => standard_normal(rng, p.tag(), p.dim(), p.nu as usize)?,
        WishartMethod::Auto | WishartMethod::Bartlett => bartlett_factor(rng, p.tag(), p.dim(), p.nu)?,
    };
    Ok(gram(&matmul(&p.chol, &factor)?))
}

/// Lower-triangular `T` with `T T* ~ 𝒲_m^β(ν, I)`.
fn bartlett_factor<R: Rng + ?Sized>(rng: &mut R, tag: AlgebraTag, m: usize, nu: f64) -> Result<DenseMatrix> {
    let beta = tag.beta_f64();
    let mut t = standard_normal(rng, tag, m, m)?;
    for i in 0..m {
        for j in i + 1..m {
            *t.q_mut(i, j) = [0.0; 4];
        }
        let g = Gamma::new(beta * (nu - i as f64) / 2.0, 2.0 / beta).map_err(|e| Error::Parameter(e.to_string()))?;
        let d: f64 = g.sample(rng);
        *t.q_mut(i, i) = [d.sqrt(), 0.0, 0.0, 0.0];
    }
    Ok(t)
}
