//! Log-domain special functions: the multivariate gamma and beta functions
//! over the cone of Hermitian positive definite matrices, the volume of the
//! Stiefel manifold, and the `τ` constant of the SVD Jacobian.
//!
//! `β` is accepted as any positive real here.

use std::f64::consts::PI;
use std::ops::{Add, Neg, Sub};

use statrs::function::gamma::ln_gamma;

use crate::algebra::AlgebraTag;
use crate::{Error, Result};

/// Natural logarithm of a positive quantity.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogValue(f64);

impl LogValue {
    pub fn new(value: f64) -> Self {
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn exp(self) -> f64 {
        self.0.exp()
    }
}

impl Add for LogValue {
    type Output = LogValue;
    fn add(self, rhs: LogValue) -> LogValue {
        LogValue(self.0 + rhs.0)
    }
}

impl Sub for LogValue {
    type Output = LogValue;
    fn sub(self, rhs: LogValue) -> LogValue {
        LogValue(self.0 - rhs.0)
    }
}

impl Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue(-self.0)
    }
}

fn check_beta_m(beta: f64, m: usize) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be a positive real, got {beta}")));
    }
    if m == 0 {
        return Err(Error::Domain("dimension m must be at least 1".into()));
    }
    Ok(())
}

/// `log Γ_m^β[a] = (m(m−1)β/4) log π + Σᵢ log Γ(a − (i−1)β/2)`.
///
/// Requires `a > (m−1)β/2`; the error names the first factor that hits a pole.
pub fn log_mgamma(beta: f64, m: usize, a: f64) -> Result<LogValue> {
    check_beta_m(beta, m)?;
    if !a.is_finite() {
        return Err(Error::Domain(format!("argument must be finite, got {a}")));
    }
    let mf = m as f64;
    let mut acc = mf * (mf - 1.0) * beta / 4.0 * PI.ln();
    for i in 1..=m {
        let arg = a - (i as f64 - 1.0) * beta / 2.0;
        if !(arg > 0.0) {
            return Err(Error::Domain(format!(
                "multivariate gamma Γ_{m}^{beta}[{a}]: factor i = {i} has argument {arg} <= 0"
            )));
        }
        acc += ln_gamma(arg);
    }
    Ok(LogValue(acc))
}

/// `log B_m^β[a, b] = log Γ_m^β[a] + log Γ_m^β[b] − log Γ_m^β[a + b]`.
pub fn log_mbeta(beta: f64, m: usize, a: f64, b: f64) -> Result<LogValue> {
    Ok(log_mgamma(beta, m, a)? + log_mgamma(beta, m, b)? - log_mgamma(beta, m, a + b)?)
}

/// `log Vol(V_{m,n}^β) = log(2^m π^{mnβ/2}) − log Γ_m^β[nβ/2]`.
pub fn log_stiefel_volume(beta: f64, m: usize, n: usize) -> Result<LogValue> {
    check_beta_m(beta, m)?;
    if m > n {
        return Err(Error::Dimension(format!("Stiefel manifold needs m <= n, got m = {m}, n = {n}")));
    }
    let (mf, nf) = (m as f64, n as f64);
    let head = mf * 2f64.ln() + mf * nf * beta / 2.0 * PI.ln();
    Ok(LogValue(head) - log_mgamma(beta, m, nf * beta / 2.0)?)
}

/// The integer `τ` appearing as `π^τ` in the SVD Jacobian, by table lookup:
/// `0, −m, −2m, −4m` for `β = 1, 2, 4, 8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TauConstant {
    pub tag: AlgebraTag,
    pub m: usize,
    pub tau: i64,
}

impl TauConstant {
    pub fn new(tag: AlgebraTag, m: usize) -> Self {
        let mi = m as i64;
        let tau = match tag {
            AlgebraTag::Real => 0,
            AlgebraTag::Complex => -mi,
            AlgebraTag::Quaternion => -2 * mi,
            AlgebraTag::Octonion => -4 * mi,
        };
        Self { tag, m, tau }
    }

    pub fn log_factor(&self) -> LogValue {
        LogValue(self.tau as f64 * PI.ln())
    }
}

/// `log π^τ` extended to every real `β > 0` as
/// `m (log Γ(β/2) − (β/2) log π)`, the reciprocal volume of the phase
/// freedom `(V_{1,1}^β)^m` of an SVD with the `2^{-m}` factored out.
///
/// This agrees with [`TauConstant`] for `β ∈ {1, 2, 4}`. At `β = 8` it
/// exceeds the tabulated `−4m log π` by `m log 6`; the spectral densities
/// use this form so that they integrate to one for every `β`.
pub fn log_pi_tau(beta: f64, m: usize) -> Result<LogValue> {
    check_beta_m(beta, m)?;
    Ok(LogValue(m as f64 * (ln_gamma(beta / 2.0) - beta / 2.0 * PI.ln())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN_PI: f64 = 1.1447298858494002;

    #[test]
    fn mgamma_examples() {
        assert!((log_mgamma(1.0, 1, 0.5).unwrap().value() - 0.5 * LN_PI).abs() < 1e-14);
        assert!((log_mgamma(1.0, 2, 1.5).unwrap().value() - (PI / 2.0).ln()).abs() < 1e-14);
        assert!((log_mgamma(2.0, 2, 2.0).unwrap().value() - LN_PI).abs() < 1e-14);
    }

    #[test]
    fn mgamma_pole_names_index() {
        let err = log_mgamma(2.0, 3, 2.0).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Domain(_)));
        assert!(msg.contains("i = 3"), "{msg}");
        assert!(log_mgamma(1.0, 1, 0.0).is_err());
        assert!(log_mgamma(0.0, 1, 1.0).is_err());
        assert!(log_mgamma(1.0, 0, 1.0).is_err());
    }

    #[test]
    fn mgamma_accepts_non_integer_beta() {
        let v = log_mgamma(3.5, 2, 4.0).unwrap().value();
        let want = 2.0 * 1.0 * 3.5 / 4.0 * LN_PI + ln_gamma(4.0) + ln_gamma(4.0 - 1.75);
        assert!((v - want).abs() < 1e-13);
    }

    #[test]
    fn mgamma_recurrence() {
        for beta in [1.0, 2.0, 4.0, 8.0, 0.7] {
            for a in [0.3, 1.0, 2.5, 17.25] {
                let d = log_mgamma(beta, 1, a + 1.0).unwrap() - log_mgamma(beta, 1, a).unwrap();
                assert!((d.value() - a.ln()).abs() < 1e-12, "beta {beta} a {a}");
            }
        }
    }

    #[test]
    fn mbeta_examples() {
        assert!(log_mbeta(1.0, 1, 1.0, 1.0).unwrap().value().abs() < 1e-14);
        assert!((log_mbeta(1.0, 1, 0.5, 0.5).unwrap().value() - LN_PI).abs() < 1e-14);
        let want = (PI / 12.0).ln();
        assert!((log_mbeta(2.0, 2, 2.0, 2.0).unwrap().value() - want).abs() < 1e-14);
        assert!((want + 1.3402).abs() < 1e-3);
        assert!(log_mbeta(2.0, 2, 0.5, 2.0).is_err());
    }

    #[test]
    fn mbeta_symmetry_is_exact() {
        for (beta, m, a, b) in [(1.0, 3, 2.2, 5.1), (4.0, 2, 3.0, 9.5), (2.0, 4, 7.0, 3.5)] {
            assert_eq!(log_mbeta(beta, m, a, b).unwrap(), log_mbeta(beta, m, b, a).unwrap());
        }
    }

    #[test]
    fn stiefel_examples() {
        let ln2 = 2f64.ln();
        assert!((log_stiefel_volume(1.0, 1, 1).unwrap().value() - ln2).abs() < 1e-14);
        assert!((log_stiefel_volume(1.0, 1, 2).unwrap().value() - (2.0 * PI).ln()).abs() < 1e-14);
        assert!((log_stiefel_volume(2.0, 1, 1).unwrap().value() - (2.0 * PI).ln()).abs() < 1e-14);
        let sphere = log_stiefel_volume(1.0, 1, 3).unwrap().exp();
        assert!((sphere - 4.0 * PI).abs() < 1e-10);
        assert!(matches!(log_stiefel_volume(1.0, 3, 2), Err(Error::Dimension(_))));
    }

    #[test]
    fn tau_table() {
        assert_eq!(TauConstant::new(AlgebraTag::Real, 3).tau, 0);
        assert_eq!(TauConstant::new(AlgebraTag::Complex, 3).tau, -3);
        assert_eq!(TauConstant::new(AlgebraTag::Quaternion, 3).tau, -6);
        assert_eq!(TauConstant::new(AlgebraTag::Octonion, 3).tau, -12);
    }

    #[test]
    fn general_tau_matches_table_for_associative_algebras() {
        for tag in [AlgebraTag::Real, AlgebraTag::Complex, AlgebraTag::Quaternion] {
            for m in 1..5 {
                let table = TauConstant::new(tag, m).log_factor().value();
                let general = log_pi_tau(tag.beta_f64(), m).unwrap().value();
                assert!((table - general).abs() < 1e-12, "{tag} m={m}");
            }
        }
        let table = TauConstant::new(AlgebraTag::Octonion, 2).log_factor().value();
        let general = log_pi_tau(8.0, 2).unwrap().value();
        assert!((general - table - 2.0 * 6f64.ln()).abs() < 1e-12);
    }
}
