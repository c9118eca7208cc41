use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::algebra::{AlgebraTag, SINGULAR_TIE_TOL};
use crate::special::{log_mbeta, log_mgamma, log_pi_tau, TauConstant};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralFlavor {
    /// Singular values `δ` of a matricvariate Pearson II matrix.
    SingularPearson,
    /// Singular values `α` of a matrix multivariate Pearson II matrix.
    SingularMm,
    /// Eigenvalues `λ = δ²` of a matricvariate beta I matrix.
    EigenBeta,
    /// Eigenvalues `γ = α²` of a matrix multivariate beta I matrix.
    EigenMm,
}

impl SpectralFlavor {
    pub fn is_singular(self) -> bool {
        matches!(self, Self::SingularPearson | Self::SingularMm)
    }

    pub fn is_matrix_multivariate(self) -> bool {
        matches!(self, Self::SingularMm | Self::EigenMm)
    }

    /// Eigenvalue counterpart of a singular flavor.
    pub fn eigen_counterpart(self) -> Self {
        match self {
            Self::SingularPearson | Self::EigenBeta => Self::EigenBeta,
            Self::SingularMm | Self::EigenMm => Self::EigenMm,
        }
    }
}

/// Selects the power of `π` in the normalizing constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PiExponent {
    /// `π^{βm²/2} · π^τ`, with `π^τ` extended to all `β > 0`.
    HalfSquare,
    /// `π^{βm²} · π^τ` with the tabulated `τ`; integrates to about
    /// `π^{βm²/2}` rather than 1 and exists for comparison only.
    Printed,
}

/// A point and parameters for one of the joint spectral densities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub values: Vec<f64>,
    pub n: f64,
    pub nu: f64,
    pub beta: f64,
    pub flavor: SpectralFlavor,
}

impl SpectralConfig {
    pub fn new(values: Vec<f64>, n: f64, nu: f64, beta: f64, flavor: SpectralFlavor) -> Self {
        Self { values, n, nu, beta, flavor }
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn density(&self) -> Result<SpectralDensity> {
        SpectralDensity::new(self.beta, self.m(), self.n, self.nu, self.flavor)
    }
}

/// A spectral density with its normalizing constant precomputed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDensity {
    beta: f64,
    m: usize,
    n: f64,
    nu: f64,
    flavor: SpectralFlavor,
    log_const: f64,
}

impl SpectralDensity {
    /// Density of the `m` ordered values for `m ≤ n`.
    pub fn new(beta: f64, m: usize, n: f64, nu: f64, flavor: SpectralFlavor) -> Result<Self> {
        Self::with_exponent(beta, m, n, nu, flavor, PiExponent::HalfSquare)
    }

    /// Density of the `min(rows, cols)` nonzero values of an `rows × cols`
    /// matrix, applying the tall substitution (`m ↔ n`, plus `ν → ν+n−m` for
    /// the matricvariate flavors) when `rows > cols`.
    pub fn for_matrix(beta: f64, rows: usize, cols: usize, nu: f64, flavor: SpectralFlavor) -> Result<Self> {
        if rows <= cols {
            return Self::new(beta, rows, cols as f64, nu, flavor);
        }
        let nu = if flavor.is_matrix_multivariate() { nu } else { nu + cols as f64 - rows as f64 };
        Self::new(beta, cols, rows as f64, nu, flavor)
    }

    pub fn with_exponent(
        beta: f64,
        m: usize,
        n: f64,
        nu: f64,
        flavor: SpectralFlavor,
        exponent: PiExponent,
    ) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Parameter(format!("beta must be a positive real, got {beta}")));
        }
        if m == 0 {
            return Err(Error::Dimension("at least one value is required".into()));
        }
        if !n.is_finite() || !nu.is_finite() {
            return Err(Error::Parameter(format!("n = {n} and nu = {nu} must be finite")));
        }
        let mf = m as f64;
        let log_pi_power = match exponent {
            PiExponent::HalfSquare => beta * mf * mf / 2.0 * PI.ln() + log_pi_tau(beta, m)?.value(),
            PiExponent::Printed => {
                let tag = AlgebraTag::ALL
                    .into_iter()
                    .find(|t| t.beta_f64() == beta)
                    .ok_or_else(|| Error::Parameter(format!("tabulated tau needs beta in {{1,2,4,8}}, got {beta}")))?;
                beta * mf * mf * PI.ln() + TauConstant::new(tag, m).log_factor().value()
            }
        };
        let log_const = match flavor {
            SpectralFlavor::SingularPearson | SpectralFlavor::EigenBeta => {
                log_pi_power
                    - log_mgamma(beta, m, beta * mf / 2.0)?.value()
                    - log_mbeta(beta, m, beta * nu / 2.0, beta * n / 2.0)?.value()
            }
            SpectralFlavor::SingularMm | SpectralFlavor::EigenMm => {
                if !(nu > 0.0) {
                    return Err(Error::Domain(format!("nu must be positive, got {nu}")));
                }
                log_pi_power + ln_gamma(beta * (nu + mf * n) / 2.0)
                    - ln_gamma(beta * nu / 2.0)
                    - log_mgamma(beta, m, beta * mf / 2.0)?.value()
                    - log_mgamma(beta, m, beta * n / 2.0)?.value()
            }
        };
        let log_const = log_const + if flavor.is_singular() { mf * 2f64.ln() } else { 0.0 };
        Ok(Self { beta, m, n, nu, flavor, log_const })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn flavor(&self) -> SpectralFlavor {
        self.flavor
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_const
    }

    /// Checks ordering, ties and range of `values`.
    pub fn check_support(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.m {
            return Err(Error::Dimension(format!("expected {} values, got {}", self.m, values.len())));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Support(format!("non-finite value {v}")));
        }
        for (i, w) in values.windows(2).enumerate() {
            if (w[0] - w[1]).abs() <= SINGULAR_TIE_TOL * w[0].abs().max(w[1].abs()) {
                return Err(Error::Degenerate(format!("values {} and {} are tied", i, i + 1)));
            }
            if w[0] < w[1] {
                return Err(Error::Support(format!("values must be strictly decreasing (index {})", i + 1)));
            }
        }
        if !(values[0] < 1.0) || !(values[self.m - 1] > 0.0) {
            return Err(Error::Support("values must lie in (0, 1)".into()));
        }
        let total = match self.flavor {
            SpectralFlavor::SingularMm => values.iter().map(|v| v * v).sum::<f64>(),
            SpectralFlavor::EigenMm => values.iter().sum::<f64>(),
            _ => 0.0,
        };
        if !(total < 1.0) {
            return Err(Error::Support(format!("values must have total mass below 1, got {total}")));
        }
        Ok(())
    }

    /// Log-density at ordered `values`.
    pub fn logpdf(&self, values: &[f64]) -> Result<f64> {
        self.check_support(values)?;
        Ok(self.log_const + self.log_kernel(values))
    }

    /// Log-density as a total function: `−∞` off the ordered support.
    pub fn logpdf_or_neg_inf(&self, values: &[f64]) -> f64 {
        match self.check_support(values) {
            Ok(()) => self.log_const + self.log_kernel(values),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    fn log_kernel(&self, v: &[f64]) -> f64 {
        let (beta, mf, n, nu) = (self.beta, self.m as f64, self.n, self.nu);
        let mut s = 0.0;
        match self.flavor {
            SpectralFlavor::SingularPearson => {
                for &d in v {
                    s += (beta * (n - mf + 1.0) - 1.0) * d.ln() + (beta * (nu - mf + 1.0) / 2.0 - 1.0) * (-d * d).ln_1p();
                }
            }
            SpectralFlavor::SingularMm => {
                let total: f64 = v.iter().map(|a| a * a).sum();
                s += (beta * nu / 2.0 - 1.0) * (-total).ln_1p();
                for &a in v {
                    s += (beta * (n - mf + 1.0) - 1.0) * a.ln();
                }
            }
            SpectralFlavor::EigenBeta => {
                for &l in v {
                    s += (beta * (n - mf + 1.0) / 2.0 - 1.0) * l.ln() + (beta * (nu - mf + 1.0) / 2.0 - 1.0) * (-l).ln_1p();
                }
            }
            SpectralFlavor::EigenMm => {
                let total: f64 = v.iter().sum();
                s += (beta * nu / 2.0 - 1.0) * (-total).ln_1p();
                for &g in v {
                    s += (beta * (n - mf + 1.0) / 2.0 - 1.0) * g.ln();
                }
            }
        }
        let squared = self.flavor.is_singular();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let gap = if squared { (v[i] - v[j]) * (v[i] + v[j]) } else { v[i] - v[j] };
                s += beta * gap.ln();
            }
        }
        s
    }
}

/// Joint spectral log-density of `c.values`.
pub fn spectral_logpdf(c: &SpectralConfig) -> Result<f64> {
    c.density()?.logpdf(&c.values)
}

/// As [`spectral_logpdf`] with an explicit choice of `π` exponent.
pub fn spectral_logpdf_with(c: &SpectralConfig, exponent: PiExponent) -> Result<f64> {
    SpectralDensity::with_exponent(c.beta, c.m(), c.n, c.nu, c.flavor, exponent)?.logpdf(&c.values)
}

/// `log f_δ(δ) − [log f_λ(δ²) + Σ log 2δᵢ]`, which vanishes when the
/// singular-value and eigenvalue densities are consistent.
pub fn change_of_variables_check(c_sv: &SpectralConfig) -> Result<f64> {
    if !c_sv.flavor.is_singular() {
        return Err(Error::Parameter(format!("{:?} is not a singular-value flavor", c_sv.flavor)));
    }
    let sv = spectral_logpdf(c_sv)?;
    let eig = SpectralConfig {
        values: c_sv.values.iter().map(|d| d * d).collect(),
        flavor: c_sv.flavor.eigen_counterpart(),
        ..c_sv.clone()
    };
    let jac: f64 = c_sv.values.iter().map(|d| (2.0 * d).ln()).sum();
    Ok(sv - (spectral_logpdf(&eig)? + jac))
}
