use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gaussian::{sample_chi2beta, sample_wishart, WishartParams};
use super::pearson::{sample_mmpearson2_standard, sample_pearson2_standard, PearsonConstruction};
use crate::algebra::{cholesky, gram, gram_adjoint, solve_lower, DenseMatrix, HermitianPD};
use crate::densities::{BetaIParams, Orientation};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaFlavor {
    Matricvariate,
    MatrixMultivariate,
}

/// Beta type I draw: `RR*` (wide) or `R*R` (tall) for a standardized
/// Pearson II matrix `R`.
///
/// A wide orientation with non-integer `n` has no `m × n` matrix behind it;
/// it is drawn from the equivalent Wishart forms `L⁻¹W₂L^{-*}` with
/// `LL* = W₁ + W₂` (matricvariate) or `W₂ / (S + tr W₂)` (matrix
/// multivariate), where `W₂ ~ 𝒲_m(n)`.
pub fn sample_beta1<R: Rng + ?Sized>(rng: &mut R, p: &BetaIParams, flavor: BetaFlavor) -> Result<HermitianPD> {
    let tag = p.tag();
    let m = p.m();
    let n = p.n_dof();
    let nu = p.nu();
    match flavor {
        BetaFlavor::Matricvariate => {
            let bound = p.beta() * (m as f64 - 1.0);
            if !(nu > bound) {
                return Err(Error::Parameter(format!(
                    "matricvariate beta type I needs nu > beta(m-1) = {bound}, got {nu}"
                )));
            }
        }
        BetaFlavor::MatrixMultivariate => {}
    }
    if n.fract() != 0.0 {
        // Orientation is wide here: tall parameters always have integer n.
        let w2 = sample_wishart(rng, &WishartParams::standard(tag, m, n)?)?;
        return match flavor {
            BetaFlavor::Matricvariate => {
                let w1 = sample_wishart(rng, &WishartParams::standard(tag, m, nu)?)?;
                let l = cholesky(&w1.add(&w2)?)?;
                w2.congruence(&solve_lower(&l, &DenseMatrix::identity(tag, m)?)?)
            }
            BetaFlavor::MatrixMultivariate => {
                let s = sample_chi2beta(rng, p.beta(), nu)?;
                Ok(w2.scale(1.0 / (s + w2.trace())))
            }
        };
    }
    let n = n as usize;
    let r = match flavor {
        BetaFlavor::Matricvariate => sample_pearson2_standard(rng, tag, m, n, nu, PearsonConstruction::RowQuotient)?,
        BetaFlavor::MatrixMultivariate => sample_mmpearson2_standard(rng, tag, m, n, nu)?.r,
    };
    Ok(match p.orientation() {
        Orientation::Wide => gram(&r),
        Orientation::Tall => gram_adjoint(&r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{herm_eigenvalues, AlgebraTag};
    use crate::densities::{beta1_logpdf, mmbeta1_logpdf};
    use crate::samplers::RngStream;
    use crate::verify::ks_test;
    use statrs::distribution::{Beta, ContinuousCDF};

    fn scalar_draws(p: &BetaIParams, flavor: BetaFlavor, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = RngStream::new(seed);
        (0..count).map(|_| sample_beta1(&mut rng, p, flavor).unwrap().trace()).collect()
    }

    #[test]
    fn scalar_laws() {
        let r = AlgebraTag::Real;
        let p = BetaIParams::new(r, 1, 2.0, 2.0).unwrap();
        let xs = scalar_draws(&p, BetaFlavor::Matricvariate, 50_000, 1);
        assert!(ks_test(&xs, |x| x.clamp(0.0, 1.0)).unwrap().p_value > 0.01);

        let p = BetaIParams::new(r, 1, 3.0, 4.0).unwrap();
        let law = Beta::new(1.5, 2.0).unwrap();
        for flavor in [BetaFlavor::Matricvariate, BetaFlavor::MatrixMultivariate] {
            let xs = scalar_draws(&p, flavor, 50_000, 2);
            assert!(ks_test(&xs, |x| law.cdf(x)).unwrap().p_value > 0.01);
        }

        // Non-integer n goes through the Wishart form.
        let p = BetaIParams::new(r, 1, 2.5, 3.0).unwrap();
        let law = Beta::new(1.25, 1.5).unwrap();
        for flavor in [BetaFlavor::Matricvariate, BetaFlavor::MatrixMultivariate] {
            let xs = scalar_draws(&p, flavor, 50_000, 3);
            assert!(ks_test(&xs, |x| law.cdf(x)).unwrap().p_value > 0.01);
        }
    }

    #[test]
    fn eigenvalues_in_unit_interval() {
        let mut rng = RngStream::new(4);
        for tag in [AlgebraTag::Real, AlgebraTag::Complex, AlgebraTag::Quaternion] {
            let beta = tag.beta_f64();
            for (m, n) in [(2, 2.0 * beta + 1.0), (2, beta + 1.5), (3, 1.0)] {
                let Ok(p) = BetaIParams::new(tag, m, n, beta * (m as f64) + 1.0) else { continue };
                for flavor in [BetaFlavor::Matricvariate, BetaFlavor::MatrixMultivariate] {
                    for _ in 0..2_000 {
                        let b = sample_beta1(&mut rng, &p, flavor).unwrap();
                        let eig = herm_eigenvalues(&b).unwrap();
                        assert!(eig.iter().all(|&v| v > 0.0 && v < 1.0));
                        let lp = match flavor {
                            BetaFlavor::Matricvariate => beta1_logpdf(&b, &p).unwrap(),
                            BetaFlavor::MatrixMultivariate => {
                                assert!(b.trace() < 1.0);
                                mmbeta1_logpdf(&b, &p).unwrap()
                            }
                        };
                        assert!(lp.is_finite());
                    }
                }
            }
        }
    }
}
