use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::densities::{SpectralConfig, SpectralDensity, SpectralFlavor};
use crate::{Error, Result};

/// Random-walk Metropolis settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McmcOptions {
    pub burn_in: usize,
    pub thin: usize,
    /// Fixed proposal scale; `None` tunes it during burn-in towards an
    /// acceptance rate between 20% and 40%.
    pub step_size: Option<f64>,
}

impl Default for McmcOptions {
    fn default() -> Self {
        Self { burn_in: 1000, thin: 10, step_size: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralChain {
    pub draws: Vec<Vec<f64>>,
    /// Acceptance rate after burn-in.
    pub acceptance_rate: f64,
    pub step_size: f64,
}

const TUNE_WINDOW: usize = 100;

/// Draws `count` ordered spectral configurations with the template's
/// flavor and parameters. The template's values are the starting point when
/// they lie in the support.
pub fn sample_spectral<R: Rng + ?Sized>(
    rng: &mut R,
    template: &SpectralConfig,
    count: usize,
    opts: &McmcOptions,
) -> Result<SpectralChain> {
    if opts.thin == 0 {
        return Err(Error::Parameter("thin must be at least 1".into()));
    }
    let density = template.density()?;
    let m = density.m();
    let mut x = if density.check_support(&template.values).is_ok() {
        template.values.clone()
    } else {
        default_start(m, density.flavor())
    };
    let mut lp = density.logpdf(&x)?;
    let mut step = match opts.step_size {
        Some(s) if s > 0.0 && s.is_finite() => s,
        Some(s) => return Err(Error::Parameter(format!("step size must be positive, got {s}"))),
        None => 0.5 / (m as f64 + 1.0),
    };
    let mut proposal = vec![0.0; m];
    let mut window_accepted = 0usize;
    for it in 0..opts.burn_in {
        if metropolis_step(rng, &density, &mut x, &mut lp, &mut proposal, step) {
            window_accepted += 1;
        }
        if opts.step_size.is_none() && (it + 1) % TUNE_WINDOW == 0 {
            let rate = window_accepted as f64 / TUNE_WINDOW as f64;
            if rate < 0.2 {
                step *= 0.6;
            } else if rate > 0.4 {
                step = (step * 1.5).min(1.0);
            }
            window_accepted = 0;
        }
    }
    let total = count * opts.thin;
    let mut accepted = 0usize;
    let mut draws = Vec::with_capacity(count);
    for it in 0..total {
        if metropolis_step(rng, &density, &mut x, &mut lp, &mut proposal, step) {
            accepted += 1;
        }
        if (it + 1) % opts.thin == 0 {
            draws.push(x.clone());
        }
    }
    let acceptance_rate = if total == 0 { 1.0 } else { accepted as f64 / total as f64 };
    if total > 0 && accepted == 0 {
        return Err(Error::Diagnostics(format!("no proposal accepted in {total} steps (step size {step:e})")));
    }
    Ok(SpectralChain { draws, acceptance_rate, step_size: step })
}

fn metropolis_step<R: Rng + ?Sized>(
    rng: &mut R,
    density: &SpectralDensity,
    x: &mut [f64],
    lp: &mut f64,
    proposal: &mut [f64],
    step: f64,
) -> bool {
    for (p, v) in proposal.iter_mut().zip(x.iter()) {
        let z: f64 = StandardNormal.sample(rng);
        *p = v + step * z;
    }
    // Proposals off the ordered support have zero target density.
    let cand = density.logpdf_or_neg_inf(proposal);
    if cand == f64::NEG_INFINITY {
        return false;
    }
    let u: f64 = rng.random();
    if u.ln() < cand - *lp {
        x.copy_from_slice(proposal);
        *lp = cand;
        true
    } else {
        false
    }
}

fn default_start(m: usize, flavor: SpectralFlavor) -> Vec<f64> {
    let mut v: Vec<f64> = (0..m).map(|i| 0.9 * (m - i) as f64 / (m as f64 + 0.5)).collect();
    let total = match flavor {
        SpectralFlavor::SingularMm => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        SpectralFlavor::EigenMm => v.iter().sum::<f64>(),
        _ => 0.0,
    };
    if total > 0.0 {
        for x in &mut v {
            *x /= 1.5 * total;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;
    use crate::verify::ks_test;

    #[test]
    fn scalar_chain_is_uniform() {
        let t = SpectralConfig::new(vec![0.5], 2.0, 2.0, 1.0, SpectralFlavor::EigenBeta);
        let opts = McmcOptions { thin: 50, ..Default::default() };
        let chain = sample_spectral(&mut RngStream::new(1), &t, 4000, &opts).unwrap();
        let xs: Vec<f64> = chain.draws.iter().map(|d| d[0]).collect();
        assert!(ks_test(&xs, |x| x.clamp(0.0, 1.0)).unwrap().p_value > 0.01);
        assert!(chain.acceptance_rate > 0.15 && chain.acceptance_rate < 0.5, "{}", chain.acceptance_rate);
    }

    #[test]
    fn octonion_draws_stay_in_support() {
        for flavor in [SpectralFlavor::SingularPearson, SpectralFlavor::SingularMm, SpectralFlavor::EigenBeta, SpectralFlavor::EigenMm] {
            let t = SpectralConfig::new(vec![], 9.0, 12.0, 8.0, flavor);
            let t = SpectralConfig { values: default_start(2, flavor), ..t };
            let chain = sample_spectral(&mut RngStream::new(2), &t, 500, &McmcOptions::default()).unwrap();
            let d = t.density().unwrap();
            for v in &chain.draws {
                d.check_support(v).unwrap();
            }
        }
    }

    #[test]
    fn tiny_fixed_step_still_moves_but_bad_step_errors() {
        let t = SpectralConfig::new(vec![0.5, 0.2], 3.0, 4.0, 1.0, SpectralFlavor::EigenBeta);
        let opts = McmcOptions { step_size: Some(1e3), burn_in: 0, thin: 1 };
        let err = sample_spectral(&mut RngStream::new(3), &t, 50, &opts).unwrap_err();
        assert!(matches!(err, Error::Diagnostics(_)));
        let opts = McmcOptions { step_size: Some(-1.0), ..Default::default() };
        assert!(sample_spectral(&mut RngStream::new(3), &t, 50, &opts).is_err());
    }

    #[test]
    fn deterministic() {
        let t = SpectralConfig::new(vec![0.5, 0.2], 3.0, 4.0, 2.0, SpectralFlavor::SingularPearson);
        let a = sample_spectral(&mut RngStream::new(4), &t, 100, &McmcOptions::default()).unwrap();
        let b = sample_spectral(&mut RngStream::new(4), &t, 100, &McmcOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
