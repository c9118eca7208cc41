use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Smallest sample accepted by the KS tests.
pub const KS_MIN_SAMPLES: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    /// Kolmogorov–Smirnov distance `D`.
    pub statistic: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
    /// Effective sample size (`n₁n₂/(n₁+n₂)` in two-sample mode).
    pub effective_n: f64,
}

/// Kolmogorov survival function `Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn p_value(d: f64, ne: f64) -> f64 {
    let sq = ne.sqrt();
    kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)
}

fn check_size(n: usize) -> Result<()> {
    if n < KS_MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: n, need: KS_MIN_SAMPLES });
    }
    Ok(())
}

/// One-sample KS test of `samples` against `cdf`.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsOutcome> {
    check_size(samples.len())?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let cdf_values: Vec<f64> = sorted.iter().map(|&x| cdf(x)).collect();
    ks_sorted(&cdf_values)
}

/// One-sample KS test given the model CDF at each sorted sample.
pub fn ks_sorted(cdf_values: &[f64]) -> Result<KsOutcome> {
    let n = cdf_values.len();
    check_size(n)?;
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &f) in cdf_values.iter().enumerate() {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Parameter(format!("CDF value {f} outside [0, 1]")));
        }
        d = d.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    Ok(KsOutcome { statistic: d, p_value: p_value(d, nf), effective_n: nf })
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsOutcome> {
    check_size(a.len().min(b.len()))?;
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    let ne = n1 * n2 / (n1 + n2);
    Ok(KsOutcome { statistic: d, p_value: p_value(d, ne), effective_n: ne })
}

/// Sample Pearson correlation.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len()) as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}
