use rand::Rng;
use rand_distr::{ChiSquared, Distribution};
use serde::{Deserialize, Serialize};

use super::gaussian::{sample_chi2beta, sample_wishart, standard_normal, WishartParams};
use crate::algebra::{
    cholesky, gram, gram_adjoint, herm_eigen, matmul, scale_rows, solve_lower, solve_lower_adjoint_right,
    AlgebraTag, DenseMatrix, HermitianPD,
};
use crate::densities::{PearsonIIParams, PearsonKind};
use crate::{Error, Result};

/// Spherical generator for the elliptical construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EllipticalGenerator {
    Normal,
    /// `Z / √(G/df)` with `G ~ χ²(df)` (real chi-square, the same for every `β`).
    MatrixT { df: f64 },
}

impl EllipticalGenerator {
    pub fn matrix_t(df: f64) -> Result<Self> {
        let g = Self::MatrixT { df };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::Normal => Ok(()),
            Self::MatrixT { df } if df > 0.0 && df.is_finite() => Ok(()),
            Self::MatrixT { df } => Err(Error::Parameter(format!("matrix-t needs df > 0, got {df}"))),
        }
    }

    /// An `m × n` draw from the spherical law with this generator.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, tag: AlgebraTag, m: usize, n: usize) -> Result<DenseMatrix> {
        self.validate()?;
        let z = standard_normal(rng, tag, m, n)?;
        Ok(match *self {
            Self::Normal => z,
            Self::MatrixT { df } => {
                let chi = ChiSquared::new(df).map_err(|e| Error::Parameter(e.to_string()))?;
                let g: f64 = chi.sample(rng);
                z.scale(1.0 / (g / df).sqrt())
            }
        })
    }
}

/// How a standardized matricvariate Pearson II matrix is built.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PearsonConstruction {
    /// `R = L⁻¹X` with `LL* = U₁ + XX*`, `U₁ ~ 𝒲_m(ν)`.
    RowQuotient,
    /// `R = Y L₁^{-*}` with `L₁L₁* = U₁ + Y*Y`, `U₁ ~ 𝒲_n(ν+n−m)`.
    ColumnQuotient,
    /// `R = L⁻¹X` where `[X | W]` is an `m × (n+ν)` spherical draw and
    /// `LL* = XX* + WW*`; needs integer `ν`.
    Elliptical { generator: EllipticalGenerator },
}

/// Square root of `U` used in the row quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareRoot {
    /// Lower Cholesky factor.
    Cholesky,
    /// Hermitian square root `U^{1/2}`.
    Symmetric,
}

/// Row-quotient draw together with `U = U₁ + XX*`, which is `𝒲_m(ν+n)` and
/// independent of `R`.
#[derive(Clone, Debug)]
pub struct QuotientDraw {
    pub r: DenseMatrix,
    pub u: HermitianPD,
}

fn apply_inverse_root(u: &HermitianPD, x: &DenseMatrix, root: SquareRoot) -> Result<DenseMatrix> {
    match root {
        SquareRoot::Cholesky => solve_lower(&cholesky(u)?, x),
        SquareRoot::Symmetric => {
            let (values, e) = herm_eigen(u)?;
            let inv_sqrt: Vec<f64> = values.iter().map(|v| 1.0 / v.sqrt()).collect();
            let ex = matmul(&crate::algebra::adjoint(&e), x)?;
            matmul(&e, &scale_rows(&ex, &inv_sqrt))
        }
    }
}

/// Standardized row-quotient draw.
pub fn sample_pearson2_quotient<R: Rng + ?Sized>(
    rng: &mut R,
    tag: AlgebraTag,
    m: usize,
    n: usize,
    nu: f64,
    root: SquareRoot,
) -> Result<QuotientDraw> {
    let u1 = sample_wishart(rng, &WishartParams::standard(tag, m, nu)?)?;
    let x = standard_normal(rng, tag, m, n)?;
    let u = u1.add(&gram(&x))?;
    let r = apply_inverse_root(&u, &x, root)?;
    Ok(QuotientDraw { r, u })
}

fn column_quotient<R: Rng + ?Sized>(rng: &mut R, tag: AlgebraTag, m: usize, n: usize, nu: f64) -> Result<DenseMatrix> {
    let nu_col = nu + n as f64 - m as f64;
    let bound = tag.beta_f64() * (n as f64 - 1.0);
    if !(nu_col > bound) {
        return Err(Error::Parameter(format!(
            "column construction needs nu + n - m > beta(n-1) = {bound}, got {nu_col}"
        )));
    }
    let u1 = sample_wishart(rng, &WishartParams::standard(tag, n, nu_col)?)?;
    let y = standard_normal(rng, tag, m, n)?;
    let v = u1.add(&gram_adjoint(&y))?;
    solve_lower_adjoint_right(&y, &cholesky(&v)?)
}

fn elliptical<R: Rng + ?Sized>(
    rng: &mut R,
    tag: AlgebraTag,
    m: usize,
    n: usize,
    nu: f64,
    generator: &EllipticalGenerator,
) -> Result<DenseMatrix> {
    if nu.fract() != 0.0 || nu < 1.0 {
        return Err(Error::Parameter(format!("elliptical construction needs integer nu, got {nu}")));
    }
    let width = n + nu as usize;
    let z = generator.sample(rng, tag, m, width)?;
    let x = DenseMatrix::from_quats(
        tag,
        m,
        n,
        (0..m).flat_map(|i| z.quats()[i * width..i * width + n].to_vec()).collect(),
    );
    solve_lower(&cholesky(&gram(&z))?, &x)
}

/// Standardized (`μ = 0`, identity scales) matricvariate Pearson II draw.
pub fn sample_pearson2_standard<R: Rng + ?Sized>(
    rng: &mut R,
    tag: AlgebraTag,
    m: usize,
    n: usize,
    nu: f64,
    construction: PearsonConstruction,
) -> Result<DenseMatrix> {
    tag.require_associative()?;
    let bound = tag.beta_f64() * (m as f64 - 1.0);
    if !(nu > bound) {
        return Err(Error::Parameter(format!("Pearson II needs nu > beta(m-1) = {bound}, got {nu}")));
    }
    match construction {
        PearsonConstruction::RowQuotient => Ok(sample_pearson2_quotient(rng, tag, m, n, nu, SquareRoot::Cholesky)?.r),
        PearsonConstruction::ColumnQuotient => column_quotient(rng, tag, m, n, nu),
        PearsonConstruction::Elliptical { generator } => elliptical(rng, tag, m, n, nu, &generator),
    }
}

/// Matricvariate Pearson II draw under `p`.
pub fn sample_pearson2<R: Rng + ?Sized>(
    rng: &mut R,
    p: &PearsonIIParams,
    construction: PearsonConstruction,
) -> Result<DenseMatrix> {
    if p.kind() != PearsonKind::Matricvariate {
        return Err(Error::Parameter("expected matricvariate parameters".into()));
    }
    let r = sample_pearson2_standard(rng, p.tag(), p.rows(), p.cols(), p.nu(), construction)?;
    p.affine_map(&r)
}

/// Standardized matrix multivariate Pearson II draw `R₁ = S₁^{-1/2} Y` with
/// `S₁ = S + tr YY*`; `S₁ ~ χ^{2,β}(ν+mn)` independently of `R₁`.
#[derive(Clone, Debug)]
pub struct MmDraw {
    pub r: DenseMatrix,
    pub s1: f64,
}

pub fn sample_mmpearson2_standard<R: Rng + ?Sized>(
    rng: &mut R,
    tag: AlgebraTag,
    m: usize,
    n: usize,
    nu: f64,
) -> Result<MmDraw> {
    tag.require_associative()?;
    let s = sample_chi2beta(rng, tag.beta_f64(), nu)?;
    let y = standard_normal(rng, tag, m, n)?;
    let s1 = s + y.trace_gram();
    Ok(MmDraw { r: y.scale(1.0 / s1.sqrt()), s1 })
}

/// Matrix multivariate Pearson II draw under `p`.
pub fn sample_mmpearson2<R: Rng + ?Sized>(rng: &mut R, p: &PearsonIIParams) -> Result<DenseMatrix> {
    if p.kind() != PearsonKind::MatrixMultivariate {
        return Err(Error::Parameter("expected matrix multivariate parameters".into()));
    }
    let d = sample_mmpearson2_standard(rng, p.tag(), p.rows(), p.cols(), p.nu())?;
    p.affine_map(&d.r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{logdet_hpd, DivisionScalar};
    use crate::densities::{mmpearson2_logpdf, pearson2_logpdf};
    use crate::samplers::RngStream;
    use crate::verify::{ks_test, ks_two_sample};

    const TAGS: [AlgebraTag; 3] = [AlgebraTag::Real, AlgebraTag::Complex, AlgebraTag::Quaternion];

    fn uniform_pm1_cdf(x: f64) -> f64 {
        ((x + 1.0) / 2.0).clamp(0.0, 1.0)
    }

    #[test]
    fn scalar_reduction_is_uniform() {
        let mut rng = RngStream::new(10);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| sample_pearson2_standard(&mut rng, AlgebraTag::Real, 1, 1, 2.0, PearsonConstruction::RowQuotient).unwrap().get(0, 0).re())
            .collect();
        assert!(ks_test(&xs, uniform_pm1_cdf).unwrap().p_value > 0.01);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| sample_mmpearson2_standard(&mut rng, AlgebraTag::Real, 1, 1, 2.0).unwrap().r.get(0, 0).re())
            .collect();
        assert!(ks_test(&xs, uniform_pm1_cdf).unwrap().p_value > 0.01);
    }

    #[test]
    fn mm_disk_is_uniform() {
        let mut rng = RngStream::new(11);
        let rs: Vec<f64> = (0..50_000)
            .map(|_| sample_mmpearson2_standard(&mut rng, AlgebraTag::Real, 2, 1, 2.0).unwrap().r.trace_gram())
            .collect();
        assert!(ks_test(&rs, |x| x.clamp(0.0, 1.0)).unwrap().p_value > 0.01);
    }

    #[test]
    fn constructions_agree() {
        let tag = AlgebraTag::Real;
        let draw = |seed: u64, c: PearsonConstruction| -> Vec<f64> {
            let mut rng = RngStream::new(seed);
            (0..20_000).map(|_| sample_pearson2_standard(&mut rng, tag, 2, 3, 5.0, c).unwrap().trace_gram()).collect()
        };
        let a = draw(1, PearsonConstruction::RowQuotient);
        let b = draw(2, PearsonConstruction::ColumnQuotient);
        let c = draw(3, PearsonConstruction::Elliptical { generator: EllipticalGenerator::matrix_t(5.0).unwrap() });
        let d = draw(4, PearsonConstruction::Elliptical { generator: EllipticalGenerator::Normal });
        assert!(ks_two_sample(&a, &b).unwrap().p_value > 0.01);
        assert!(ks_two_sample(&c, &d).unwrap().p_value > 0.01);
        assert!(ks_two_sample(&a, &d).unwrap().p_value > 0.01);
    }

    #[test]
    fn square_roots_agree() {
        let tag = AlgebraTag::Complex;
        let mut rng = RngStream::new(12);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for _ in 0..20_000 {
            a.push(sample_pearson2_quotient(&mut rng, tag, 2, 2, 3.0, SquareRoot::Cholesky).unwrap().r.trace_gram());
            b.push(sample_pearson2_quotient(&mut rng, tag, 2, 2, 3.0, SquareRoot::Symmetric).unwrap().r.trace_gram());
        }
        assert!(ks_two_sample(&a, &b).unwrap().p_value > 0.01);
    }

    #[test]
    fn outputs_are_in_support() {
        let mut rng = RngStream::new(13);
        for tag in TAGS {
            let beta = tag.beta_f64();
            for (m, n) in [(1, 1), (2, 3), (3, 2)] {
                let nu = beta * (m.max(n) as f64 - 1.0) + 1.0;
                let mu = DenseMatrix::from_quats(tag, m, n, vec![[0.3, 0.0, 0.0, 0.0]; m * n]);
                let mut left = HermitianPD::diagonal(tag, &vec![2.0; m]).unwrap().to_dense();
                if m > 1 {
                    left.set(1, 0, &DivisionScalar::real(tag, 0.5)).unwrap();
                    left.set(0, 1, &DivisionScalar::real(tag, 0.5)).unwrap();
                }
                let left = HermitianPD::from_dense(&left).unwrap();
                let right = HermitianPD::diagonal(tag, &(0..n).map(|i| 0.5 + i as f64).collect::<Vec<_>>()).unwrap();
                let p = PearsonIIParams::new(PearsonKind::Matricvariate, nu, mu.clone(), left.clone(), right.clone()).unwrap();
                let pm = PearsonIIParams::new(PearsonKind::MatrixMultivariate, nu, mu, left, right).unwrap();
                for c in [PearsonConstruction::RowQuotient, PearsonConstruction::ColumnQuotient] {
                    for _ in 0..500 {
                        let q = sample_pearson2(&mut rng, &p, c).unwrap();
                        assert!(pearson2_logpdf(&q, &p).unwrap().is_finite());
                    }
                }
                for _ in 0..500 {
                    let q = sample_mmpearson2(&mut rng, &pm).unwrap();
                    assert!(mmpearson2_logpdf(&q, &pm).unwrap().is_finite());
                }
            }
        }
    }

    #[test]
    fn u_is_independent_of_r() {
        let mut rng = RngStream::new(14);
        let n = 20_000;
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for _ in 0..n {
            let d = sample_pearson2_quotient(&mut rng, AlgebraTag::Real, 2, 2, 3.0, SquareRoot::Cholesky).unwrap();
            a.push(d.u.trace());
            b.push(d.r.trace_gram());
        }
        assert!(crate::verify::pearson_correlation(&a, &b).abs() < 0.04);
    }

    #[test]
    fn u_marginal_is_wishart() {
        let mut rng = RngStream::new(15);
        let mut a = Vec::new();
        let mut b = Vec::new();
        let w = WishartParams::standard(AlgebraTag::Real, 2, 5.0).unwrap();
        for _ in 0..20_000 {
            a.push(logdet_hpd(&sample_pearson2_quotient(&mut rng, AlgebraTag::Real, 2, 2, 3.0, SquareRoot::Cholesky).unwrap().u).unwrap());
            b.push(logdet_hpd(&sample_wishart(&mut rng, &w).unwrap()).unwrap());
        }
        assert!(ks_two_sample(&a, &b).unwrap().p_value > 0.01);
    }

    #[test]
    fn parameter_errors() {
        let mut rng = RngStream::new(0);
        let r = AlgebraTag::Real;
        assert!(sample_pearson2_standard(&mut rng, r, 2, 2, 1.0, PearsonConstruction::RowQuotient).is_err());
        // Row quotient valid, column quotient not: nu + n - m = 2.5 <= beta(n-1) = 4.
        let c = AlgebraTag::Complex;
        assert!(sample_pearson2_standard(&mut rng, c, 1, 3, 0.5, PearsonConstruction::RowQuotient).is_ok());
        assert!(sample_pearson2_standard(&mut rng, AlgebraTag::Complex, 1, 3, 0.5, PearsonConstruction::ColumnQuotient).is_err());
        let e = PearsonConstruction::Elliptical { generator: EllipticalGenerator::Normal };
        assert!(sample_pearson2_standard(&mut rng, r, 2, 2, 2.5, e).is_err());
        assert!(EllipticalGenerator::matrix_t(0.0).is_err());
        assert!(sample_pearson2_standard(&mut rng, AlgebraTag::Octonion, 1, 1, 2.0, PearsonConstruction::RowQuotient).is_err());
    }

    #[test]
    fn determinism() {
        let p = PearsonIIParams::standard(PearsonKind::Matricvariate, AlgebraTag::Quaternion, 2, 2, 6.0).unwrap();
        let a: Vec<_> = {
            let mut rng = RngStream::new(77);
            (0..5).map(|_| sample_pearson2(&mut rng, &p, PearsonConstruction::RowQuotient).unwrap()).collect()
        };
        let mut rng = RngStream::new(77);
        for x in a {
            assert_eq!(x, sample_pearson2(&mut rng, &p, PearsonConstruction::RowQuotient).unwrap());
        }
    }
}
