use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use super::params::{BetaIParams, Orientation, PearsonIIParams, PearsonKind};
use crate::algebra::{adjoint, logdet_if_pd, matmul, DenseMatrix, HermitianPD};
use crate::special::{log_mbeta, log_mgamma};
use crate::{Error, Result};

fn require_kind(p: &PearsonIIParams, kind: PearsonKind) -> Result<()> {
    if p.kind() != kind {
        return Err(Error::Parameter(format!("expected {kind:?} parameters, got {:?}", p.kind())));
    }
    Ok(())
}

fn centered(q: &DenseMatrix, p: &PearsonIIParams) -> Result<DenseMatrix> {
    if q.tag() != p.tag() {
        return Err(Error::Parameter(format!("point is over {}, parameters over {}", q.tag(), p.tag())));
    }
    if q.rows() != p.rows() || q.cols() != p.cols() {
        return Err(Error::Dimension(format!(
            "point is {}x{}, parameters are {}x{}",
            q.rows(),
            q.cols(),
            p.rows(),
            p.cols()
        )));
    }
    q.sub(p.mu())
}

/// Matricvariate Pearson type II log-density in the `m × m` determinant form
/// `|𝔅⁻¹ − (Q−μ)𝔇⁻¹(Q−μ)*|`.
pub fn pearson2_logpdf(q: &DenseMatrix, p: &PearsonIIParams) -> Result<f64> {
    require_kind(p, PearsonKind::Matricvariate)?;
    let d = centered(q, p)?;
    let support = p.inv_left.sub(&p.inv_right.congruence(&d)?)?;
    let Some(ld) = logdet_if_pd(&support)? else {
        return Ok(f64::NEG_INFINITY);
    };
    let beta = p.beta();
    let (m, n, nu) = (p.rows() as f64, p.cols() as f64, p.nu());
    let rows = p.rows();
    let konst = log_mgamma(beta, rows, beta * (n + nu) / 2.0)?.value()
        - log_mgamma(beta, rows, beta * nu / 2.0)?.value()
        - m * n * beta / 2.0 * PI.ln();
    Ok(konst + (beta * (nu + n - m + 1.0) / 2.0 - 1.0) * p.logdet_left
        - beta * m / 2.0 * p.logdet_right
        + (beta * (nu - m + 1.0) / 2.0 - 1.0) * ld)
}

/// The same density in the `n × n` form `|𝔇 − (Q−μ)*𝔅(Q−μ)|`.
pub fn pearson2_logpdf_dual(q: &DenseMatrix, p: &PearsonIIParams) -> Result<f64> {
    require_kind(p, PearsonKind::Matricvariate)?;
    let d = centered(q, p)?;
    let support = p.scale_right().sub(&p.scale_left().congruence(&adjoint(&d))?)?;
    let Some(ld) = logdet_if_pd(&support)? else {
        return Ok(f64::NEG_INFINITY);
    };
    let beta = p.beta();
    let (m, n, nu) = (p.rows() as f64, p.cols() as f64, p.nu());
    let cols = p.cols();
    let konst = log_mgamma(beta, cols, beta * (n + nu) / 2.0)?.value()
        - log_mgamma(beta, cols, beta * (n + nu - m) / 2.0)?.value()
        - m * n * beta / 2.0 * PI.ln();
    Ok(konst + beta * n / 2.0 * p.logdet_left
        - (beta * (nu + 1.0) / 2.0 - 1.0) * p.logdet_right
        + (beta * (nu - m + 1.0) / 2.0 - 1.0) * ld)
}

/// Matrix multivariate Pearson type II log-density, with support
/// `tr 𝔅(Q₁−μ)𝔇(Q₁−μ)* < 1`.
pub fn mmpearson2_logpdf(q1: &DenseMatrix, p: &PearsonIIParams) -> Result<f64> {
    require_kind(p, PearsonKind::MatrixMultivariate)?;
    let d = centered(q1, p)?;
    // tr 𝔅 D 𝔇 D* = ‖M* D N‖² with 𝔅 = MM*, 𝔇 = NN*.
    let r = matmul(&matmul(&adjoint(&p.chol_left), &d)?, &p.chol_right)?;
    let t = r.trace_gram();
    if !(t < 1.0) {
        return Ok(f64::NEG_INFINITY);
    }
    let beta = p.beta();
    let (m, n, nu) = (p.rows() as f64, p.cols() as f64, p.nu());
    Ok(ln_gamma(beta * (nu + m * n) / 2.0) - ln_gamma(beta * nu / 2.0) - beta * m * n / 2.0 * PI.ln()
        + beta * n / 2.0 * p.logdet_left
        + beta * m / 2.0 * p.logdet_right
        + (beta * nu / 2.0 - 1.0) * (-t).ln_1p())
}

/// `(m, n, ν)` after the tall-orientation substitution for the
/// matricvariate flavor.
fn matricvariate_dims(p: &BetaIParams) -> (usize, f64, f64) {
    let m = p.m() as f64;
    match p.orientation() {
        Orientation::Wide => (p.m(), p.n_dof(), p.nu()),
        Orientation::Tall => (p.matrix_dim(), m, p.nu() + p.n_dof() - m),
    }
}

fn check_beta_point(b: &HermitianPD, p: &BetaIParams) -> Result<()> {
    if b.tag() != p.tag() {
        return Err(Error::Parameter(format!("point is over {}, parameters over {}", b.tag(), p.tag())));
    }
    if b.dim() != p.matrix_dim() {
        return Err(Error::Dimension(format!(
            "beta matrix is {}x{}, expected {}x{}",
            b.dim(),
            b.dim(),
            p.matrix_dim(),
            p.matrix_dim()
        )));
    }
    Ok(())
}

/// Matricvariate beta type I log-density of `B = RR*` (wide) or `R*R`
/// (tall). Requires `ν > β(m−1)`; `−∞` outside `0 < B < I`.
pub fn beta1_logpdf(b: &HermitianPD, p: &BetaIParams) -> Result<f64> {
    check_beta_point(b, p)?;
    let beta = p.beta();
    let bound = beta * (p.m() as f64 - 1.0);
    if !(p.nu() > bound) {
        return Err(Error::Parameter(format!(
            "matricvariate beta type I needs nu > beta(m-1) = {bound}, got {}",
            p.nu()
        )));
    }
    let Some(ld) = logdet_if_pd(b)? else {
        return Ok(f64::NEG_INFINITY);
    };
    let Some(ld_c) = logdet_if_pd(&b.complement())? else {
        return Ok(f64::NEG_INFINITY);
    };
    let (dim, n, nu) = matricvariate_dims(p);
    let m = dim as f64;
    Ok(-log_mbeta(beta, dim, beta * nu / 2.0, beta * n / 2.0)?.value()
        + (beta * (n - m + 1.0) / 2.0 - 1.0) * ld
        + (beta * (nu - m + 1.0) / 2.0 - 1.0) * ld_c)
}

/// Matrix multivariate beta type I log-density of `B₁ = R₁R₁*` (wide) or
/// `R₁*R₁` (tall); `−∞` unless `B₁ > 0` and `tr B₁ < 1`.
pub fn mmbeta1_logpdf(b1: &HermitianPD, p: &BetaIParams) -> Result<f64> {
    check_beta_point(b1, p)?;
    let t = b1.trace();
    if !(t < 1.0) {
        return Ok(f64::NEG_INFINITY);
    }
    let Some(ld) = logdet_if_pd(b1)? else {
        return Ok(f64::NEG_INFINITY);
    };
    let beta = p.beta();
    let (mm, nn) = (p.m() as f64, p.n_dof());
    let (dim, n) = match p.orientation() {
        Orientation::Wide => (p.m(), nn),
        Orientation::Tall => (p.matrix_dim(), mm),
    };
    let m = dim as f64;
    let nu = p.nu();
    Ok(ln_gamma(beta * (nu + mm * nn) / 2.0)
        - ln_gamma(beta * nu / 2.0)
        - log_mgamma(beta, dim, beta * n / 2.0)?.value()
        + (beta * (n - m + 1.0) / 2.0 - 1.0) * ld
        + (beta * nu / 2.0 - 1.0) * (-t).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{gram, AlgebraTag, DivisionScalar};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const LN_PI: f64 = 1.1447298858494002;

    fn scalar(tag: AlgebraTag, c: &[f64]) -> DenseMatrix {
        DenseMatrix::from_coeffs(tag, 1, 1, &[c]).unwrap()
    }

    fn std_params(kind: PearsonKind, tag: AlgebraTag, m: usize, n: usize, nu: f64) -> PearsonIIParams {
        PearsonIIParams::standard(kind, tag, m, n, nu).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, tag: AlgebraTag, m: usize, n: usize, s: f64) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(tag, m, n).unwrap();
        for i in 0..m {
            for j in 0..n {
                let c: Vec<f64> = (0..tag.beta()).map(|_| s * (rng.random::<f64>() * 2.0 - 1.0)).collect();
                a.set(i, j, &DivisionScalar::new(tag, &c).unwrap()).unwrap();
            }
        }
        a
    }

    fn random_pd(rng: &mut ChaCha8Rng, tag: AlgebraTag, m: usize) -> HermitianPD {
        let a = random_matrix(rng, tag, m, m + 1, 1.0);
        gram(&a).add(&HermitianPD::identity(tag, m).unwrap().scale(0.3)).unwrap()
    }

    #[test]
    fn pearson_scalar_examples() {
        let r = AlgebraTag::Real;
        let p = std_params(PearsonKind::Matricvariate, r, 1, 1, 2.0);
        for x in [-0.9, -0.3, 0.0, 0.5, 0.99] {
            let v = pearson2_logpdf(&scalar(r, &[x]), &p).unwrap();
            assert!((v - 0.5f64.ln()).abs() < 1e-12, "{x}: {v}");
        }
        assert_eq!(pearson2_logpdf(&scalar(r, &[1.5]), &p).unwrap(), f64::NEG_INFINITY);

        let c = AlgebraTag::Complex;
        let p = std_params(PearsonKind::Matricvariate, c, 1, 1, 2.0);
        let v = pearson2_logpdf(&scalar(c, &[0.0, 0.0]), &p).unwrap();
        assert!((v - (2.0 / PI).ln()).abs() < 1e-12);
    }

    #[test]
    fn pearson_rejects_wrong_kind_and_shape() {
        let r = AlgebraTag::Real;
        let p = std_params(PearsonKind::MatrixMultivariate, r, 1, 1, 2.0);
        assert!(matches!(pearson2_logpdf(&scalar(r, &[0.0]), &p), Err(Error::Parameter(_))));
        let p = std_params(PearsonKind::Matricvariate, r, 2, 2, 2.0);
        assert!(matches!(pearson2_logpdf(&scalar(r, &[0.0]), &p), Err(Error::Dimension(_))));
    }

    #[test]
    fn dual_agrees_in_random_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for tag in [AlgebraTag::Real, AlgebraTag::Complex, AlgebraTag::Quaternion] {
            for (m, n) in [(1, 1), (2, 3), (3, 2), (2, 2)] {
                let beta = tag.beta_f64();
                let nu = beta * (m as f64 - 1.0) + 0.5 + rng.random::<f64>() * 3.0;
                let mu = random_matrix(&mut rng, tag, m, n, 0.3);
                let p = PearsonIIParams::new(
                    PearsonKind::Matricvariate,
                    nu,
                    mu.clone(),
                    random_pd(&mut rng, tag, m),
                    random_pd(&mut rng, tag, n),
                )
                .unwrap();
                let mut checked = 0;
                for _ in 0..50 {
                    let q = mu.add(&random_matrix(&mut rng, tag, m, n, 0.4)).unwrap();
                    let a = pearson2_logpdf(&q, &p).unwrap();
                    let b = pearson2_logpdf_dual(&q, &p).unwrap();
                    if a.is_finite() {
                        checked += 1;
                        assert!((a - b).abs() < 1e-10, "{tag} {m}x{n}: {a} vs {b}");
                    } else {
                        assert_eq!(b, f64::NEG_INFINITY);
                    }
                }
                assert!(checked > 0, "{tag} {m}x{n}: no point inside the support");
            }
        }
    }

    #[test]
    fn mm_pearson_examples() {
        let r = AlgebraTag::Real;
        let p = std_params(PearsonKind::MatrixMultivariate, r, 2, 1, 2.0);
        let q = DenseMatrix::from_real(r, 2, 1, &[0.3, -0.5]).unwrap();
        assert!((mmpearson2_logpdf(&q, &p).unwrap() + LN_PI).abs() < 1e-12);
        let edge = DenseMatrix::from_real(r, 2, 1, &[0.6, 0.8]).unwrap();
        assert_eq!(mmpearson2_logpdf(&edge, &p).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn scalar_flavors_coincide() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for tag in [AlgebraTag::Real, AlgebraTag::Complex, AlgebraTag::Quaternion] {
            for nu in [0.7, 2.0, 5.5] {
                let mu = random_matrix(&mut rng, tag, 1, 1, 0.2);
                let left = HermitianPD::diagonal(tag, &[0.5 + rng.random::<f64>()]).unwrap();
                let right = HermitianPD::identity(tag, 1).unwrap();
                let a = PearsonIIParams::new(PearsonKind::Matricvariate, nu, mu.clone(), left.clone(), right.clone())
                    .unwrap();
                let b = PearsonIIParams::new(PearsonKind::MatrixMultivariate, nu, mu.clone(), left, right).unwrap();
                for _ in 0..20 {
                    let q = mu.add(&random_matrix(&mut rng, tag, 1, 1, 0.6)).unwrap();
                    let x = pearson2_logpdf(&q, &a).unwrap();
                    let y = mmpearson2_logpdf(&q, &b).unwrap();
                    if x.is_finite() || y.is_finite() {
                        assert!((x - y).abs() < 1e-12, "{tag} nu={nu}: {x} vs {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn beta_examples() {
        let r = AlgebraTag::Real;
        let b = |x: f64| HermitianPD::diagonal(r, &[x]).unwrap();
        let p = BetaIParams::new(r, 1, 2.0, 2.0).unwrap();
        assert!(beta1_logpdf(&b(0.7), &p).unwrap().abs() < 1e-12);
        assert_eq!(beta1_logpdf(&b(1.2), &p).unwrap(), f64::NEG_INFINITY);
        let p = BetaIParams::new(r, 1, 3.0, 2.0).unwrap();
        assert!((beta1_logpdf(&b(0.25), &p).unwrap() - 0.75f64.ln()).abs() < 1e-12);

        let p = BetaIParams::new(r, 1, 2.0, 2.0).unwrap();
        assert!(mmbeta1_logpdf(&b(0.4), &p).unwrap().abs() < 1e-12);
        assert_eq!(mmbeta1_logpdf(&b(1.0), &p).unwrap(), f64::NEG_INFINITY);
        // Beta(3/2, 2) at 0.3.
        let p = BetaIParams::new(r, 1, 3.0, 4.0).unwrap();
        let want = ln_gamma(3.5) - ln_gamma(1.5) - ln_gamma(2.0) + 0.5 * 0.3f64.ln() + 0.7f64.ln();
        assert!((mmbeta1_logpdf(&b(0.3), &p).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn beta_requires_matching_dimension() {
        let r = AlgebraTag::Real;
        let p = BetaIParams::new(r, 3, 2.0, 4.0).unwrap();
        let wrong = HermitianPD::identity(r, 3).unwrap().scale(0.1);
        assert!(matches!(beta1_logpdf(&wrong, &p), Err(Error::Dimension(_))));
        let right = HermitianPD::identity(r, 2).unwrap().scale(0.1);
        assert!(beta1_logpdf(&right, &p).unwrap().is_finite());
    }

    #[test]
    fn support_boundary_falls_to_minus_infinity() {
        let r = AlgebraTag::Real;
        let p = std_params(PearsonKind::Matricvariate, r, 1, 1, 5.0);
        let mut prev = f64::INFINITY;
        for eps in [1e-1f64, 1e-3, 1e-6, 1e-9] {
            let v = pearson2_logpdf(&scalar(r, &[(1.0 - eps).sqrt()]), &p).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < -10.0);
    }

    fn tag_strategy() -> impl Strategy<Value = AlgebraTag> {
        prop_oneof![Just(AlgebraTag::Real), Just(AlgebraTag::Complex), Just(AlgebraTag::Quaternion)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn transpose_duality(tag in tag_strategy(), m in 1usize..4, n in 1usize..4, seed in any::<u64>(), extra in 0.1f64..4.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let beta = tag.beta_f64();
            let nu = beta * (m.max(n) as f64 - 1.0) + extra;
            let mu = random_matrix(&mut rng, tag, m, n, 0.3);
            let left = random_pd(&mut rng, tag, m);
            let right = random_pd(&mut rng, tag, n);
            let p = PearsonIIParams::new(PearsonKind::Matricvariate, nu, mu.clone(), left.clone(), right.clone()).unwrap();
            let pt = PearsonIIParams::new(
                PearsonKind::Matricvariate,
                nu + n as f64 - m as f64,
                adjoint(&mu),
                crate::algebra::inverse_hpd(&right).unwrap(),
                crate::algebra::inverse_hpd(&left).unwrap(),
            ).unwrap();
            for _ in 0..8 {
                let q = mu.add(&random_matrix(&mut rng, tag, m, n, 0.3)).unwrap();
                let a = pearson2_logpdf(&q, &p).unwrap();
                let b = pearson2_logpdf(&adjoint(&q), &pt).unwrap();
                if a.is_finite() {
                    prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{} vs {}", a, b);
                } else {
                    prop_assert_eq!(b, f64::NEG_INFINITY);
                }
            }
        }

        #[test]
        fn affine_consistency(tag in tag_strategy(), m in 1usize..4, n in 1usize..4, seed in any::<u64>(), extra in 0.1f64..4.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let beta = tag.beta_f64();
            let nu = beta * (m as f64 - 1.0) + extra;
            let mu = random_matrix(&mut rng, tag, m, n, 0.3);
            let left = random_pd(&mut rng, tag, m);
            let right = random_pd(&mut rng, tag, n);
            let p = PearsonIIParams::new(PearsonKind::Matricvariate, nu, mu.clone(), left.clone(), right.clone()).unwrap();
            let id = PearsonIIParams::standard(PearsonKind::Matricvariate, tag, m, n, nu).unwrap();
            let pm = PearsonIIParams::new(PearsonKind::MatrixMultivariate, extra, mu.clone(), left, right).unwrap();
            let idm = PearsonIIParams::standard(PearsonKind::MatrixMultivariate, tag, m, n, extra).unwrap();
            for _ in 0..8 {
                let q = mu.add(&random_matrix(&mut rng, tag, m, n, 0.25)).unwrap();
                let d = q.sub(&mu).unwrap();
                let ms_d = matmul(&adjoint(&p.chol_left), &d).unwrap();

                // Matricvariate: R = M*(Q−μ)N^{-*}.
                let r = crate::algebra::solve_lower_adjoint_right(&ms_d, &p.chol_right).unwrap();
                let a = pearson2_logpdf(&q, &p).unwrap();
                let b = pearson2_logpdf(&r, &id).unwrap() + beta * n as f64 / 2.0 * p.logdet_left
                    - beta * m as f64 / 2.0 * p.logdet_right;
                if a.is_finite() || b.is_finite() {
                    prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{} vs {}", a, b);
                }

                // Matrix multivariate: R = M*(Q−μ)N.
                let r = matmul(&ms_d, &pm.chol_right).unwrap();
                let a = mmpearson2_logpdf(&q, &pm).unwrap();
                let b = mmpearson2_logpdf(&r, &idm).unwrap() + beta * n as f64 / 2.0 * pm.logdet_left
                    + beta * m as f64 / 2.0 * pm.logdet_right;
                if a.is_finite() || b.is_finite() {
                    prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{} vs {}", a, b);
                }
            }
        }
    }
}
