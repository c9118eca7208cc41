use rand::Rng;
use serde::{Deserialize, Serialize};

use super::quadrature::{NormalizationEstimate, NormalizationMethod};
use crate::{Error, Result};

/// Bounding region sampled uniformly by [`mc_normalize`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum McRegion {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// `{1 > x₁ > ⋯ > x_d > 0}`, of volume `1/d!`.
    OrderedSimplex { dim: usize },
}

impl McRegion {
    pub fn volume(&self) -> f64 {
        match self {
            Self::Box { lower, upper } => lower.iter().zip(upper).map(|(a, b)| b - a).product(),
            Self::OrderedSimplex { dim } => 1.0 / (1..=*dim).map(|k| k as f64).product::<f64>(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Box { lower, upper } => {
                if lower.is_empty() || lower.len() != upper.len() || lower.iter().zip(upper).any(|(a, b)| !(b > a)) {
                    return Err(Error::Parameter("box needs matching bounds with lower < upper".into()));
                }
            }
            Self::OrderedSimplex { dim } => {
                if *dim == 0 {
                    return Err(Error::Parameter("simplex dimension must be positive".into()));
                }
            }
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        out.clear();
        match self {
            Self::Box { lower, upper } => out.extend(lower.iter().zip(upper).map(|(a, b)| a + (b - a) * rng.random::<f64>())),
            Self::OrderedSimplex { dim } => {
                out.extend((0..*dim).map(|_| rng.random::<f64>()));
                out.sort_by(|a, b| b.total_cmp(a));
            }
        }
    }
}

/// `vol · mean exp(logpdf(U))` for `U` uniform on the region, with its
/// standard error.
pub fn mc_normalize<R: Rng + ?Sized>(
    rng: &mut R,
    logpdf: &dyn Fn(&[f64]) -> f64,
    region: &McRegion,
    n: usize,
) -> Result<NormalizationEstimate> {
    region.validate()?;
    if n < 2 {
        return Err(Error::TooFewSamples { got: n, need: 2 });
    }
    let vol = region.volume();
    let mut x = Vec::new();
    let (mut sum, mut sq) = (0.0, 0.0);
    let mut hits = 0usize;
    for _ in 0..n {
        region.draw(rng, &mut x);
        let lp = logpdf(&x);
        if lp.is_nan() || lp == f64::INFINITY {
            return Err(Error::Domain(format!("log-density is {lp} at {x:?}")));
        }
        if lp > f64::NEG_INFINITY {
            hits += 1;
            let v = lp.exp();
            sum += v;
            sq += v * v;
        }
    }
    if hits == 0 {
        return Err(Error::Diagnostics(format!("none of {n} points fell in the support")));
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = (sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
    Ok(NormalizationEstimate {
        estimate: vol * mean,
        std_error: Some(vol * (var / nf).sqrt()),
        method: NormalizationMethod::UniformMc,
        evaluations: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;

    #[test]
    fn uniform_square() {
        let r = McRegion::Box { lower: vec![0.0, 0.0], upper: vec![1.0, 1.0] };
        let est = mc_normalize(&mut RngStream::new(1), &|_| 0.0, &r, 10_000).unwrap();
        assert!((est.estimate - 1.0).abs() < 1e-12);
        assert_eq!(est.std_error, Some(0.0));
    }

    #[test]
    fn ordered_simplex_volume() {
        let r = McRegion::OrderedSimplex { dim: 3 };
        assert!((r.volume() - 1.0 / 6.0).abs() < 1e-15);
        // Density 6 on the simplex.
        let est = mc_normalize(&mut RngStream::new(2), &|_| 6f64.ln(), &r, 1000).unwrap();
        assert!((est.estimate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_disk_indicator() {
        let r = McRegion::Box { lower: vec![-1.0, -1.0], upper: vec![1.0, 1.0] };
        let f = |x: &[f64]| if x[0] * x[0] + x[1] * x[1] < 1.0 { -std::f64::consts::PI.ln() } else { f64::NEG_INFINITY };
        let est = mc_normalize(&mut RngStream::new(3), &f, &r, 200_000).unwrap();
        let se = est.std_error.unwrap();
        assert!((est.estimate - 1.0).abs() < 4.0 * se, "{} ± {se}", est.estimate);
    }

    #[test]
    fn no_hits_is_an_error() {
        let r = McRegion::OrderedSimplex { dim: 2 };
        let err = mc_normalize(&mut RngStream::new(4), &|_| f64::NEG_INFINITY, &r, 100).unwrap_err();
        assert!(matches!(err, Error::Diagnostics(_)));
    }
}
