use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use statrs::distribution::{Beta, ContinuousCDF, Gamma};

use super::mc::{mc_normalize, McRegion};
use super::quadrature::{quadrature_cdf, quadrature_normalize, Domain, Integrator};
use super::stats::{ks_sorted, ks_test, ks_two_sample, pearson_correlation};
use crate::algebra::{
    adjoint, gram, herm_eigenvalues, inverse_hpd, logdet_hpd, matmul, solve_lower_adjoint_right, svd, AlgebraTag,
    DenseMatrix, DivisionScalar, HermitianPD,
};
use crate::densities::{
    beta1_logpdf, change_of_variables_check, mmbeta1_logpdf, mmpearson2_logpdf, pearson2_logpdf, BetaIParams,
    PearsonIIParams, PearsonKind, SpectralConfig, SpectralDensity, SpectralFlavor,
};
use crate::samplers::{
    sample_beta1, sample_chi2beta, sample_mmpearson2_standard, sample_pearson2_quotient, sample_pearson2_standard,
    sample_spectral, sample_wishart, sample_wishart_with, BetaFlavor, EllipticalGenerator, McmcOptions,
    PearsonConstruction, RngStream, SquareRoot, WishartMethod, WishartParams,
};
use crate::special::log_mgamma;
use crate::{Error, Result};

fn default_threshold() -> f64 {
    0.01
}

fn default_samples() -> usize {
    20_000
}

fn default_instances() -> usize {
    100
}

fn default_points() -> usize {
    1_000_000
}

fn default_thin() -> usize {
    100
}

/// A verification suite: named list of checks, a master seed and the
/// p-value threshold shared by every statistical test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub tests: Vec<TestSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarParams {
    pub beta: u32,
    pub n: f64,
    pub nu: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixParams {
    pub beta: u32,
    pub m: usize,
    pub n: usize,
    pub nu: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStatistic {
    Trace,
    LambdaMax,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionParams {
    pub beta: u32,
    pub m: usize,
    pub n: usize,
    pub nu: f64,
    pub a: PearsonConstruction,
    pub b: PearsonConstruction,
    #[serde(default = "default_statistic")]
    pub statistic: TraceStatistic,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_statistic() -> TraceStatistic {
    TraceStatistic::Trace
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralParams {
    pub beta: f64,
    pub m: usize,
    pub n: f64,
    pub nu: f64,
    pub flavor: SpectralFlavor,
    #[serde(default = "default_points")]
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralDirectParams {
    pub beta: u32,
    pub m: usize,
    pub n: usize,
    pub nu: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_thin")]
    pub thin: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityParams {
    pub beta: f64,
    pub m: usize,
    #[serde(default)]
    pub n: usize,
    #[serde(default = "default_instances")]
    pub instances: usize,
}

/// One check. Serialized as `{"family": ..., "params": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum TestSpec {
    /// Quadrature of the matricvariate Pearson II density at `m = n = 1`.
    NormalizationPearson2 { beta: u32, nu: f64 },
    /// Quadrature of the matrix multivariate Pearson II density when
    /// `βmn ≤ 2`.
    NormalizationMmpearson2 { beta: u32, m: usize, n: usize, nu: f64 },
    /// Quadrature of the beta type I density at `m = 1`.
    NormalizationBeta1 { beta: u32, n: f64, nu: f64 },
    NormalizationMmbeta1 { beta: u32, n: f64, nu: f64 },
    /// Quadrature (`m = 1`) or uniform Monte Carlo (`m ≥ 2`) of a spectral
    /// density.
    NormalizationSpectral(SpectralParams),
    /// `1 × 1` real Pearson II draws against the quadrature CDF.
    KsPearson2Scalar {
        nu: f64,
        construction: PearsonConstruction,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// `m = 1` beta type I draws against the quadrature CDF.
    KsBeta1Scalar {
        #[serde(flatten)]
        p: ScalarParams,
        flavor: BetaFlavor,
    },
    /// `tr R₁R₁* ~ Beta(βmn/2, βν/2)` for matrix multivariate draws.
    KsMmpearson2Radius(MatrixParams),
    /// Two constructions of the matricvariate Pearson II law.
    KsConstructions(ConstructionParams),
    /// Metropolis singular values against SVDs of direct draws.
    KsSpectralVsDirect(SpectralDirectParams),
    /// Bartlett and Gram Wishart draws compared through `log |U|`.
    KsWishartBartlettGram { beta: u32, m: usize, nu: f64, #[serde(default = "default_samples")] samples: usize },
    KsChi2beta { beta: u32, nu: f64, #[serde(default = "default_samples")] samples: usize },
    /// `S₁ ~ χ^{2,β}(ν+mn)` in the matrix multivariate construction.
    KsMmS1Marginal(MatrixParams),
    /// `U` and `R` of the row quotient are uncorrelated.
    Independence(MatrixParams),
    /// `log |U|` of the row quotient against direct `𝒲(ν+n)` draws.
    UMarginal(MatrixParams),
    Duality(IdentityParams),
    Affine(IdentityParams),
    ChangeOfVariables(IdentityParams),
    /// `log Γ₁^β(a)` against quadrature of the gamma integral.
    MgammaQuadrature { beta: f64, a: f64 },
}

impl TestSpec {
    pub fn family(&self) -> String {
        match serde_json::to_value(self) {
            Ok(Value::Object(map)) => map.get("family").and_then(Value::as_str).unwrap_or("").to_string(),
            _ => String::new(),
        }
    }

    fn params(&self) -> Value {
        match serde_json::to_value(self) {
            Ok(Value::Object(mut map)) => map.remove("params").unwrap_or(Value::Null),
            _ => Value::Null,
        }
    }

    /// Stochastic checks get one retry with a fresh preregistered seed.
    fn is_stochastic(&self) -> bool {
        !matches!(
            self,
            Self::NormalizationPearson2 { .. }
                | Self::NormalizationMmpearson2 { .. }
                | Self::NormalizationBeta1 { .. }
                | Self::NormalizationMmbeta1 { .. }
                | Self::MgammaQuadrature { .. }
                | Self::ChangeOfVariables(_)
        ) && !matches!(self, Self::NormalizationSpectral(p) if p.m == 1)
    }

    /// Checks parameter values before anything runs.
    pub fn validate(&self) -> Result<()> {
        let fam = self.family();
        let bad = |msg: String| Err(Error::Config(format!("{fam}: {msg}")));
        let tag_of = |beta: u32| -> Result<AlgebraTag> {
            let tag = AlgebraTag::from_beta(beta).map_err(|e| Error::Config(format!("{fam}: {e}")))?;
            tag.require_associative().map_err(|e| Error::Config(format!("{fam}: {e}")))?;
            Ok(tag)
        };
        let samples_ok = |s: usize| -> Result<()> {
            if s < super::stats::KS_MIN_SAMPLES {
                return Err(Error::Config(format!("{fam}: samples must be at least {}", super::stats::KS_MIN_SAMPLES)));
            }
            Ok(())
        };
        match self {
            Self::NormalizationPearson2 { beta, nu } => {
                if *beta > 2 {
                    return bad("quadrature covers beta 1 and 2 only".into());
                }
                PearsonIIParams::standard(PearsonKind::Matricvariate, tag_of(*beta)?, 1, 1, *nu)?;
            }
            Self::NormalizationMmpearson2 { beta, m, n, nu } => {
                if *beta as usize * m * n > 2 {
                    return bad("quadrature needs beta*m*n <= 2".into());
                }
                PearsonIIParams::standard(PearsonKind::MatrixMultivariate, tag_of(*beta)?, *m, *n, *nu)?;
            }
            Self::NormalizationBeta1 { beta, n, nu } | Self::NormalizationMmbeta1 { beta, n, nu } => {
                BetaIParams::new(tag_of(*beta)?, 1, *n, *nu)?;
            }
            Self::NormalizationSpectral(p) => {
                SpectralDensity::new(p.beta, p.m, p.n, p.nu, p.flavor)?;
                if p.m > 1 && p.points < 1000 {
                    return bad("at least 1000 Monte Carlo points are required".into());
                }
            }
            Self::KsPearson2Scalar { nu, construction, samples } => {
                samples_ok(*samples)?;
                PearsonIIParams::standard(PearsonKind::Matricvariate, AlgebraTag::Real, 1, 1, *nu)?;
                if let PearsonConstruction::Elliptical { .. } = construction {
                    if nu.fract() != 0.0 {
                        return bad("elliptical construction needs integer nu".into());
                    }
                }
            }
            Self::KsBeta1Scalar { p, flavor } => {
                samples_ok(p.samples)?;
                let params = BetaIParams::new(tag_of(p.beta)?, 1, p.n, p.nu)?;
                if *flavor == BetaFlavor::Matricvariate && !(params.nu() > 0.0) {
                    return bad("nu must be positive".into());
                }
            }
            Self::KsMmpearson2Radius(p) | Self::KsMmS1Marginal(p) => {
                samples_ok(p.samples)?;
                PearsonIIParams::standard(PearsonKind::MatrixMultivariate, tag_of(p.beta)?, p.m, p.n, p.nu)?;
            }
            Self::KsConstructions(p) => {
                samples_ok(p.samples)?;
                PearsonIIParams::standard(PearsonKind::Matricvariate, tag_of(p.beta)?, p.m, p.n, p.nu)?;
            }
            Self::KsSpectralVsDirect(p) => {
                samples_ok(p.samples)?;
                if p.m > p.n {
                    return bad("needs m <= n".into());
                }
                PearsonIIParams::standard(PearsonKind::Matricvariate, tag_of(p.beta)?, p.m, p.n, p.nu)?;
                if p.thin == 0 {
                    return bad("thin must be positive".into());
                }
            }
            Self::KsWishartBartlettGram { beta, m, nu, samples } => {
                samples_ok(*samples)?;
                WishartParams::standard(tag_of(*beta)?, *m, *nu)?;
                if nu.fract() != 0.0 {
                    return bad("Gram construction needs integer nu".into());
                }
            }
            Self::KsChi2beta { beta, nu, samples } => {
                samples_ok(*samples)?;
                tag_of(*beta)?;
                if !(*nu > 0.0) {
                    return bad("nu must be positive".into());
                }
            }
            Self::Independence(p) | Self::UMarginal(p) => {
                samples_ok(p.samples)?;
                PearsonIIParams::standard(PearsonKind::Matricvariate, tag_of(p.beta)?, p.m, p.n, p.nu)?;
            }
            Self::Duality(p) | Self::Affine(p) => {
                if p.beta.fract() != 0.0 {
                    return bad("beta must be 1, 2 or 4".into());
                }
                tag_of(p.beta as u32)?;
                if p.m == 0 || p.n == 0 || p.instances == 0 {
                    return bad("m, n and instances must be positive".into());
                }
            }
            Self::ChangeOfVariables(p) => {
                if !(p.beta > 0.0) || p.m == 0 || p.instances == 0 {
                    return bad("beta, m and instances must be positive".into());
                }
            }
            Self::MgammaQuadrature { beta, a } => {
                if !(*beta > 0.0) || !(*a > 0.0) {
                    return bad("beta and a must be positive".into());
                }
            }
        }
        Ok(())
    }
}

/// Result of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub family: String,
    pub parameters: Value,
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_error: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_nodes: Option<usize>,
    pub runtime_seconds: f64,
    pub seed: u64,
    pub retried: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub reports: Vec<TestReport>,
    pub passed: bool,
}

impl SuiteReport {
    /// The report with runtime fields zeroed, for comparing runs.
    pub fn without_timings(&self) -> Self {
        let mut out = self.clone();
        for r in &mut out.reports {
            r.runtime_seconds = 0.0;
        }
        out
    }
}

enum Measure {
    PValue(f64),
    /// Error and the tolerance it must stay below.
    AbsError(f64, f64),
}

struct Outcome {
    statistic: f64,
    measure: Measure,
    n_samples: Option<usize>,
    nodes: Option<usize>,
}

impl Outcome {
    fn p(statistic: f64, p: f64, n: usize) -> Self {
        Self { statistic, measure: Measure::PValue(p), n_samples: Some(n), nodes: None }
    }

    fn abs(statistic: f64, err: f64, tol: f64) -> Self {
        Self { statistic, measure: Measure::AbsError(err, tol), n_samples: None, nodes: None }
    }

    fn passed(&self, threshold: f64) -> bool {
        match self.measure {
            Measure::PValue(p) => p > threshold,
            Measure::AbsError(e, tol) => e < tol,
        }
    }
}

/// SplitMix64 finalizer, used to derive per-test seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const RETRY_SALT: u64 = 0x7265_7472_795f_5f31;

/// Runs every test of `config` on up to `jobs` threads (`None` for the
/// rayon default). Configuration problems are reported before any test
/// runs; failures of individual tests are recorded in the report.
pub fn run_suite(config: &SuiteConfig, jobs: Option<usize>) -> Result<SuiteReport> {
    if !(config.threshold > 0.0 && config.threshold < 1.0) {
        return Err(Error::Config(format!("threshold must lie in (0, 1), got {}", config.threshold)));
    }
    for t in &config.tests {
        t.validate()?;
    }
    let run_all = || -> Vec<TestReport> {
        config
            .tests
            .par_iter()
            .enumerate()
            .map(|(i, t)| run_one(t, splitmix64(config.seed.wrapping_add(i as u64)), config.threshold))
            .collect()
    };
    let reports = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };
    let passed = reports.iter().all(|r| r.passed);
    Ok(SuiteReport { suite: config.suite.clone(), reports, passed })
}

fn run_one(spec: &TestSpec, seed: u64, threshold: f64) -> TestReport {
    let start = Instant::now();
    let mut used_seed = seed;
    let mut retried = false;
    let mut result = execute(spec, seed);
    let failed = match &result {
        Ok(o) => !o.passed(threshold),
        Err(_) => true,
    };
    if failed && spec.is_stochastic() {
        used_seed = splitmix64(seed ^ RETRY_SALT);
        retried = true;
        result = execute(spec, used_seed);
    }
    let family = spec.family();
    let parameters = spec.params();
    let name = format!("{family}{parameters}");
    let runtime_seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(o) => {
            let passed = o.passed(threshold);
            let (p_value, abs_error, threshold) = match o.measure {
                Measure::PValue(p) => (Some(p), None, threshold),
                Measure::AbsError(e, tol) => (None, Some(e), tol),
            };
            TestReport {
                name,
                family,
                parameters,
                statistic: o.statistic,
                p_value,
                abs_error,
                threshold,
                passed,
                n_samples: o.n_samples,
                quadrature_nodes: o.nodes,
                runtime_seconds,
                seed: used_seed,
                retried,
                error: None,
            }
        }
        Err(e) => TestReport {
            name,
            family,
            parameters,
            statistic: f64::NAN,
            p_value: None,
            abs_error: None,
            threshold,
            passed: false,
            n_samples: None,
            quadrature_nodes: None,
            runtime_seconds,
            seed: used_seed,
            retried,
            error: Some(e.to_string()),
        },
    }
}

const QUADRATURE_TOL: f64 = 1e-8;
const IDENTITY_TOL: f64 = 1e-10;

fn quadrature_outcome(logpdf: &dyn Fn(&[f64]) -> f64, domain: Domain) -> Result<Outcome> {
    let est = quadrature_normalize(logpdf, &domain)?;
    let err = (est.estimate - 1.0).abs();
    Ok(Outcome { nodes: Some(est.evaluations), ..Outcome::abs(est.estimate, err, QUADRATURE_TOL) })
}

fn scalar_point(tag: AlgebraTag, coeffs: &[f64], m: usize, n: usize) -> DenseMatrix {
    let beta = tag.beta();
    let mut a = DenseMatrix::zeros(tag, m, n).expect("nonempty");
    for i in 0..m {
        for j in 0..n {
            let k = (i * n + j) * beta;
            a.set(i, j, &DivisionScalar::new(tag, &coeffs[k..k + beta]).expect("length")).expect("tag");
        }
    }
    a
}

fn one_by_one(tag: AlgebraTag, x: f64) -> HermitianPD {
    HermitianPD::diagonal(tag, &[x]).expect("associative")
}

fn random_matrix(rng: &mut RngStream, tag: AlgebraTag, m: usize, n: usize, s: f64) -> Result<DenseMatrix> {
    let coeffs: Vec<f64> = (0..m * n * tag.beta()).map(|_| s * (2.0 * rng.random::<f64>() - 1.0)).collect();
    Ok(scalar_point(tag, &coeffs, m, n))
}

fn random_pd(rng: &mut RngStream, tag: AlgebraTag, m: usize) -> Result<HermitianPD> {
    let a = random_matrix(rng, tag, m, m + 1, 1.0)?;
    gram(&a).add(&HermitianPD::identity(tag, m)?.scale(0.3))
}

fn singular_values_sample(rng: &mut RngStream, p: &SpectralDirectParams) -> Result<Vec<Vec<f64>>> {
    let tag = AlgebraTag::from_beta(p.beta)?;
    (0..p.samples)
        .map(|_| {
            let r = sample_pearson2_standard(rng, tag, p.m, p.n, p.nu, PearsonConstruction::RowQuotient)?;
            Ok(svd(&r)?.singulars)
        })
        .collect()
}

fn execute(spec: &TestSpec, seed: u64) -> Result<Outcome> {
    let mut rng = RngStream::new(seed);
    match spec {
        TestSpec::NormalizationPearson2 { beta, nu } => {
            let tag = AlgebraTag::from_beta(*beta)?;
            let p = PearsonIIParams::standard(PearsonKind::Matricvariate, tag, 1, 1, *nu)?;
            let f = |x: &[f64]| pearson2_logpdf(&scalar_point(tag, x, 1, 1), &p).unwrap_or(f64::NAN);
            let domain = if *beta == 1 { Domain::Interval { a: -1.0, b: 1.0 } } else { Domain::Disk { radius: 1.0 } };
            quadrature_outcome(&f, domain)
        }
        TestSpec::NormalizationMmpearson2 { beta, m, n, nu } => {
            let tag = AlgebraTag::from_beta(*beta)?;
            let p = PearsonIIParams::standard(PearsonKind::MatrixMultivariate, tag, *m, *n, *nu)?;
            let f = |x: &[f64]| mmpearson2_logpdf(&scalar_point(tag, x, *m, *n), &p).unwrap_or(f64::NAN);
            let dim = *beta as usize * m * n;
            let domain = if dim == 1 { Domain::Interval { a: -1.0, b: 1.0 } } else { Domain::Disk { radius: 1.0 } };
            quadrature_outcome(&f, domain)
        }
        TestSpec::NormalizationBeta1 { beta, n, nu } => {
            let p = BetaIParams::new(AlgebraTag::from_beta(*beta)?, 1, *n, *nu)?;
            let f = |x: &[f64]| beta1_logpdf(&one_by_one(p.tag(), x[0]), &p).unwrap_or(f64::NAN);
            quadrature_outcome(&f, Domain::Interval { a: 0.0, b: 1.0 })
        }
        TestSpec::NormalizationMmbeta1 { beta, n, nu } => {
            let p = BetaIParams::new(AlgebraTag::from_beta(*beta)?, 1, *n, *nu)?;
            let f = |x: &[f64]| mmbeta1_logpdf(&one_by_one(p.tag(), x[0]), &p).unwrap_or(f64::NAN);
            quadrature_outcome(&f, Domain::Interval { a: 0.0, b: 1.0 })
        }
        TestSpec::NormalizationSpectral(p) => {
            let d = SpectralDensity::new(p.beta, p.m, p.n, p.nu, p.flavor)?;
            let f = |x: &[f64]| d.logpdf_or_neg_inf(x);
            if p.m == 1 {
                return quadrature_outcome(&f, Domain::Interval { a: 0.0, b: 1.0 });
            }
            let est = mc_normalize(&mut rng, &f, &McRegion::OrderedSimplex { dim: p.m }, p.points)?;
            let se = est.std_error.unwrap_or(0.0);
            Ok(Outcome {
                n_samples: Some(p.points),
                ..Outcome::abs(est.estimate, (est.estimate - 1.0).abs(), 3.0 * se)
            })
        }
        TestSpec::KsPearson2Scalar { nu, construction, samples } => {
            let p = PearsonIIParams::standard(PearsonKind::Matricvariate, AlgebraTag::Real, 1, 1, *nu)?;
            let mut xs = (0..*samples)
                .map(|_| Ok(sample_pearson2_standard(&mut rng, AlgebraTag::Real, 1, 1, *nu, *construction)?.get(0, 0).re()))
                .collect::<Result<Vec<f64>>>()?;
            xs.sort_by(f64::total_cmp);
            let f = |x: f64| pearson2_logpdf(&scalar_point(AlgebraTag::Real, &[x], 1, 1), &p).unwrap_or(f64::NAN);
            let ks = ks_sorted(&quadrature_cdf(&f, -1.0, 1.0, &xs)?)?;
            Ok(Outcome::p(ks.statistic, ks.p_value, *samples))
        }
        TestSpec::KsBeta1Scalar { p, flavor } => {
            let params = BetaIParams::new(AlgebraTag::from_beta(p.beta)?, 1, p.n, p.nu)?;
            let mut xs = (0..p.samples)
                .map(|_| Ok(sample_beta1(&mut rng, &params, *flavor)?.trace()))
                .collect::<Result<Vec<f64>>>()?;
            xs.sort_by(f64::total_cmp);
            let f = |x: f64| {
                let b = one_by_one(params.tag(), x);
                match flavor {
                    BetaFlavor::Matricvariate => beta1_logpdf(&b, &params),
                    BetaFlavor::MatrixMultivariate => mmbeta1_logpdf(&b, &params),
                }
                .unwrap_or(f64::NAN)
            };
            let ks = ks_sorted(&quadrature_cdf(&f, 0.0, 1.0, &xs)?)?;
            Ok(Outcome::p(ks.statistic, ks.p_value, p.samples))
        }
        TestSpec::KsMmpearson2Radius(p) => {
            let tag = AlgebraTag::from_beta(p.beta)?;
            let beta = tag.beta_f64();
            let xs = (0..p.samples)
                .map(|_| Ok(sample_mmpearson2_standard(&mut rng, tag, p.m, p.n, p.nu)?.r.trace_gram()))
                .collect::<Result<Vec<f64>>>()?;
            let law = Beta::new(beta * (p.m * p.n) as f64 / 2.0, beta * p.nu / 2.0)
                .map_err(|e| Error::Parameter(e.to_string()))?;
            let ks = ks_test(&xs, |x| law.cdf(x.clamp(0.0, 1.0)))?;
            Ok(Outcome::p(ks.statistic, ks.p_value, p.samples))
        }
        TestSpec::KsConstructions(p) => {
            let tag = AlgebraTag::from_beta(p.beta)?;
            let stat = |r: DenseMatrix| -> Result<f64> {
                Ok(match p.statistic {
                    TraceStatistic::Trace => r.trace_gram(),
                    TraceStatistic::LambdaMax => herm_eigenvalues(&gram(&r))?[0],
                })
            };
            let mut ra = rng.substream(0);
            let mut rb = rng.substream(1);
            let a = (0..p.samples)
                .map(|_| stat(sample_pearson2_standard(&mut ra, tag, p.m, p.n, p.nu, p.a)?))
                .collect::<Result<Vec<f64>>>()?;
            let b = (0..p.samples)
                .map(|_| stat(sample_pearson2_standard(&mut rb, tag, p.m, p.n, p.nu, p.b)?))
                .collect::<Result<Vec<f64>>>()?;
            let ks = ks_two_sample(&a, &b)?;
            Ok(Outcome::p(ks.statistic, ks.p_value, p.samples))
        }
        TestSpec::KsSpectralVsDirect(p) => {
            let direct = singular_values_sample(&mut rng.substream(0), p)?;
            let template = SpectralConfig::new(vec![], p.n as f64, p.nu, p.beta as f64, SpectralFlavor::SingularPearson);
            let template = SpectralConfig { values: direct[0].clone(), ..template };
            let opts = McmcOptions { thin: p.thin, ..Default::default() };
            let chain = sample_spectral(&mut rng.substream(1), &template, p.samples, &opts)?;
            let first = |v: &[Vec<f64>]| v.iter().map(|d| d[0]).collect::<Vec<f64>>();
            let last = |v: &[Vec<f64>]| v.iter().map(|d| d[d.len() - 1]).collect::<Vec<f64>>();
            let k1 = ks_two_sample(&first(&direct), &first(&chain.draws))?;
            let k2 = ks_two_sample(&last(&direct), &last(&chain.draws))?;
            let p_value = (2.0 * k1.p_value.min(k2.p_value)).min(1.0);
            Ok(Outcome::p(k1.statistic.max(k2.statistic), p_value, p.samples))
        }
        TestSpec::KsWishartBartlettGram { beta, m, nu, samples } => {
            let w = WishartParams::standard(AlgebraTag::from_beta(*beta)?, *m, *nu)?;
            let mut draw = |method| -> Result<Vec<f64>> {
                (0..*samples).map(|_| logdet_hpd(&sample_wishart_with(&mut rng, &w, method)?)).collect()
            };
            let a = draw(WishartMethod::Gram)?;
            let b = draw(WishartMethod::Bartlett)?;
            let ks = ks_two_sample(&a, &b)?;
            Ok(Outcome::p(ks.statistic, ks.p_value, *samples))
        }
        TestSpec::KsChi2beta { beta, nu, samples } => {
            let b = *beta as f64;
            let xs = (0..*samples).map(|_| sample_chi2beta(&mut rng, b, *nu)).collect::<Result<Vec<f64>>>()?;
            let law = Gamma::new(b * nu / 2.0, b / 2.0).map_err(|e| Error::Parameter(e.to_string()))?;
            let ks = ks_test(&xs, |x| law.cdf(x))?;
            Ok(Outcome::p(ks.statistic, ks.p_value, *samples))
        }
        TestSpec::KsMmS1Marginal(p) => {
            let tag = AlgebraTag::from_beta(p.beta)?;
            let b = tag.beta_f64();
            let xs = (0..p.samples)
                .map(|_| Ok(sample_mmpearson2_standard(&mut rng, tag, p.m, p.n, p.nu)?.s1))
                .collect::<Result<Vec<f64>>>()?;
            let law = Gamma::new(b * (p.nu + (p.m * p.n) as f64) / 2.0, b / 2.0)
                .map_err(|e| Error::Parameter(e.to_string()))?;
            let ks = ks_test(&xs, |x| law.cdf(x))?;
            Ok(Outcome::p(ks.statistic, ks.p_value, p.samples))
        }
        TestSpec::Independence(p) => {
            let tag = AlgebraTag::from_beta(p.beta)?;
            let (mut tu, mut tr, mut lu, mut lr) = (vec![], vec![], vec![], vec![]);
            for _ in 0..p.samples {
                let d = sample_pearson2_quotient(&mut rng, tag, p.m, p.n, p.nu, SquareRoot::Cholesky)?;
                let b = gram(&d.r);
                tu.push(d.u.trace());
                tr.push(b.trace());
                lu.push(logdet_hpd(&d.u)?);
                lr.push(logdet_hpd(&b.complement())?);
            }
            let c = pearson_correlation(&tu, &tr).abs().max(pearson_correlation(&lu, &lr).abs());
            Ok(Outcome { n_samples: Some(p.samples), ..Outcome::abs(c, c, 0.02) })
        }
        TestSpec::UMarginal(p) => {
            let tag = AlgebraTag::from_beta(p.beta)?;
            let w = WishartParams::standard(tag, p.m, p.nu + p.n as f64)?;
            let mut a = Vec::with_capacity(p.samples);
            let mut b = Vec::with_capacity(p.samples);
            for _ in 0..p.samples {
                a.push(logdet_hpd(&sample_pearson2_quotient(&mut rng, tag, p.m, p.n, p.nu, SquareRoot::Cholesky)?.u)?);
                b.push(logdet_hpd(&sample_wishart(&mut rng, &w)?)?);
            }
            let ks = ks_two_sample(&a, &b)?;
            Ok(Outcome::p(ks.statistic, ks.p_value, p.samples))
        }
        TestSpec::Duality(p) => {
            let err = duality_error(&mut rng, AlgebraTag::from_beta(p.beta as u32)?, p.m, p.n, p.instances)?;
            Ok(Outcome { n_samples: Some(p.instances), ..Outcome::abs(err, err, IDENTITY_TOL) })
        }
        TestSpec::Affine(p) => {
            let err = affine_error(&mut rng, AlgebraTag::from_beta(p.beta as u32)?, p.m, p.n, p.instances)?;
            Ok(Outcome { n_samples: Some(p.instances), ..Outcome::abs(err, err, IDENTITY_TOL) })
        }
        TestSpec::ChangeOfVariables(p) => {
            let err = change_of_variables_error(&mut rng, p.beta, p.m, p.instances)?;
            Ok(Outcome { n_samples: Some(p.instances), ..Outcome::abs(err, err, IDENTITY_TOL) })
        }
        TestSpec::MgammaQuadrature { beta, a } => {
            let want = log_mgamma(*beta, 1, *a)?.value();
            let got = gamma_integral(*a)?.ln();
            let err = ((got - want) / want.abs().max(1e-300)).abs();
            Ok(Outcome::abs(got, err, QUADRATURE_TOL))
        }
    }
}

/// `∫₀^∞ t^{a−1} e^{−t} dt` by quadrature on `(0, 1)` and, after `t = 1/u`,
/// again on `(0, 1)`.
pub fn gamma_integral(a: f64) -> Result<f64> {
    let mut q = Integrator::new(1e-14);
    let head = q.integrate_smoothed(&mut |t| Ok(t.powf(a - 1.0) * (-t).exp()), 0.0, 1.0)?;
    let tail = q.integrate_smoothed(
        &mut |u| Ok(if u <= 0.0 { 0.0 } else { u.powf(-a - 1.0) * (-1.0 / u).exp() }),
        0.0,
        1.0,
    )?;
    Ok(head + tail)
}

/// Largest `|log f(Q) − log f*(Q*)|` over random instances, where `f*` is the
/// transposed law `(ν+n−m, μ*, 𝔇⁻¹, 𝔅⁻¹)`.
pub fn duality_error(rng: &mut RngStream, tag: AlgebraTag, m: usize, n: usize, instances: usize) -> Result<f64> {
    let beta = tag.beta_f64();
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < instances {
        let nu = beta * (m.max(n) as f64 - 1.0) + 0.1 + 3.0 * rng.random::<f64>();
        let mu = random_matrix(rng, tag, m, n, 0.3)?;
        let left = random_pd(rng, tag, m)?;
        let right = random_pd(rng, tag, n)?;
        let p = PearsonIIParams::new(PearsonKind::Matricvariate, nu, mu.clone(), left.clone(), right.clone())?;
        let pt = PearsonIIParams::new(
            PearsonKind::Matricvariate,
            nu + n as f64 - m as f64,
            adjoint(&mu),
            inverse_hpd(&right)?,
            inverse_hpd(&left)?,
        )?;
        let q = mu.add(&random_matrix(rng, tag, m, n, 0.25)?)?;
        let a = pearson2_logpdf(&q, &p)?;
        let b = pearson2_logpdf(&adjoint(&q), &pt)?;
        if a.is_finite() {
            worst = worst.max((a - b).abs() / (1.0 + a.abs()));
            done += 1;
        } else if b.is_finite() {
            return Ok(f64::INFINITY);
        }
    }
    Ok(worst)
}

/// Largest violation of the affine reparameterization identities of both
/// Pearson II flavors over random instances.
pub fn affine_error(rng: &mut RngStream, tag: AlgebraTag, m: usize, n: usize, instances: usize) -> Result<f64> {
    let beta = tag.beta_f64();
    let (mf, nf) = (m as f64, n as f64);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < instances {
        let nu = beta * (mf - 1.0) + 0.1 + 3.0 * rng.random::<f64>();
        let mu = random_matrix(rng, tag, m, n, 0.3)?;
        let left = random_pd(rng, tag, m)?;
        let right = random_pd(rng, tag, n)?;
        let p = PearsonIIParams::new(PearsonKind::Matricvariate, nu, mu.clone(), left.clone(), right.clone())?;
        let pm = PearsonIIParams::new(PearsonKind::MatrixMultivariate, nu, mu.clone(), left, right)?;
        let id = PearsonIIParams::standard(PearsonKind::Matricvariate, tag, m, n, nu)?;
        let idm = PearsonIIParams::standard(PearsonKind::MatrixMultivariate, tag, m, n, nu)?;
        let q = mu.add(&random_matrix(rng, tag, m, n, 0.25)?)?;
        let ms_d = matmul(&adjoint(&p.chol_left), &q.sub(&mu)?)?;
        let r = solve_lower_adjoint_right(&ms_d, &p.chol_right)?;
        let a = pearson2_logpdf(&q, &p)?;
        let b = pearson2_logpdf(&r, &id)? + beta * nf / 2.0 * p.logdet_left - beta * mf / 2.0 * p.logdet_right;
        let r1 = matmul(&ms_d, &pm.chol_right)?;
        let c = mmpearson2_logpdf(&q, &pm)?;
        let d = mmpearson2_logpdf(&r1, &idm)? + beta * nf / 2.0 * pm.logdet_left + beta * mf / 2.0 * pm.logdet_right;
        let mut any = false;
        for (x, y) in [(a, b), (c, d)] {
            if x.is_finite() || y.is_finite() {
                worst = worst.max((x - y).abs() / (1.0 + x.abs()));
                any = true;
            }
        }
        if any {
            done += 1;
        }
    }
    Ok(worst)
}

/// Largest `|change_of_variables_check|` over random ordered configurations
/// of both singular flavors.
pub fn change_of_variables_error(rng: &mut RngStream, beta: f64, m: usize, instances: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..instances {
        let mut v: Vec<f64> = (0..m).map(|_| 0.02 + 0.96 * rng.random::<f64>()).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        if v.windows(2).any(|w| w[0] - w[1] < 1e-6) {
            continue;
        }
        let flavor = if k % 2 == 0 {
            SpectralFlavor::SingularPearson
        } else {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in &mut v {
                *x /= 1.2 * norm.max(1.0);
            }
            SpectralFlavor::SingularMm
        };
        let n = m as f64 + 3.0 * rng.random::<f64>();
        let nu = m as f64 + 3.0 * rng.random::<f64>();
        let c = SpectralConfig::new(v, n, nu, beta, flavor);
        worst = worst.max(change_of_variables_check(&c)?.abs());
    }
    Ok(worst)
}

impl SuiteConfig {
    pub fn empty(name: &str) -> Self {
        Self { suite: name.into(), seed: 0, threshold: default_threshold(), tests: vec![] }
    }

    /// The standard suite: normalization, sampler agreement, side
    /// contracts and identities over `β ∈ {1, 2, 4}`.
    pub fn default_suite() -> Self {
        use TestSpec::*;
        let s = default_samples();
        let mut tests = vec![
            MgammaQuadrature { beta: 1.0, a: 0.7 },
            MgammaQuadrature { beta: 2.0, a: 2.3 },
        ];
        for nu in [2.0, 3.0, 5.0] {
            tests.push(NormalizationPearson2 { beta: 1, nu });
        }
        for nu in [2.0, 4.0] {
            tests.push(NormalizationPearson2 { beta: 2, nu });
        }
        tests.push(NormalizationMmpearson2 { beta: 1, m: 1, n: 1, nu: 3.0 });
        tests.push(NormalizationMmpearson2 { beta: 1, m: 2, n: 1, nu: 2.5 });
        tests.push(NormalizationMmpearson2 { beta: 2, m: 1, n: 1, nu: 1.5 });
        for beta in [1, 2, 4] {
            let b = beta as f64;
            tests.push(NormalizationBeta1 { beta, n: 2.0 + b, nu: 1.5 + b });
            tests.push(NormalizationMmbeta1 { beta, n: 1.5 + b, nu: 3.0 });
            tests.push(KsBeta1Scalar {
                p: ScalarParams { beta, n: 2.0, nu: 3.0, samples: s },
                flavor: BetaFlavor::Matricvariate,
            });
            tests.push(KsBeta1Scalar {
                p: ScalarParams { beta, n: 3.0, nu: 1.5, samples: s },
                flavor: BetaFlavor::MatrixMultivariate,
            });
            tests.push(KsMmpearson2Radius(MatrixParams { beta, m: 2, n: 2, nu: 1.5, samples: s }));
            tests.push(KsMmS1Marginal(MatrixParams { beta, m: 2, n: 3, nu: 2.0, samples: s }));
            tests.push(KsChi2beta { beta, nu: 3.0, samples: s });
            tests.push(KsWishartBartlettGram { beta, m: 2, nu: 2.0 * b + 3.0, samples: s });
            tests.push(KsConstructions(ConstructionParams {
                beta,
                m: 2,
                n: 3,
                nu: 3.0 * b,
                a: PearsonConstruction::RowQuotient,
                b: PearsonConstruction::ColumnQuotient,
                statistic: TraceStatistic::Trace,
                samples: s,
            }));
            tests.push(Independence(MatrixParams { beta, m: 2, n: 2, nu: b + 2.0, samples: s }));
            tests.push(UMarginal(MatrixParams { beta, m: 2, n: 2, nu: b + 2.0, samples: s }));
            tests.push(Duality(IdentityParams { beta: b, m: 2, n: 3, instances: 100 }));
            tests.push(Affine(IdentityParams { beta: b, m: 3, n: 2, instances: 100 }));
            tests.push(NormalizationSpectral(SpectralParams {
                beta: b,
                m: 2,
                n: 2.0 + b,
                nu: 2.0 * b + 1.0,
                flavor: SpectralFlavor::SingularPearson,
                points: 200_000,
            }));
        }
        for beta in [1.0, 2.0, 4.0, 8.0] {
            tests.push(ChangeOfVariables(IdentityParams { beta, m: 2, n: 0, instances: 100 }));
            tests.push(NormalizationSpectral(SpectralParams {
                beta,
                m: 1,
                n: 2.0,
                nu: 3.0,
                flavor: SpectralFlavor::SingularMm,
                points: default_points(),
            }));
        }
        for flavor in [SpectralFlavor::EigenBeta, SpectralFlavor::EigenMm, SpectralFlavor::SingularMm] {
            tests.push(NormalizationSpectral(SpectralParams {
                beta: 1.0,
                m: 2,
                n: 3.0,
                nu: 4.0,
                flavor,
                points: 200_000,
            }));
        }
        tests.push(KsPearson2Scalar { nu: 2.0, construction: PearsonConstruction::RowQuotient, samples: s });
        tests.push(KsPearson2Scalar { nu: 3.5, construction: PearsonConstruction::ColumnQuotient, samples: s });
        tests.push(KsConstructions(ConstructionParams {
            beta: 1,
            m: 2,
            n: 3,
            nu: 4.0,
            a: PearsonConstruction::Elliptical { generator: EllipticalGenerator::MatrixT { df: 5.0 } },
            b: PearsonConstruction::Elliptical { generator: EllipticalGenerator::Normal },
            statistic: TraceStatistic::LambdaMax,
            samples: s,
        }));
        tests.push(KsSpectralVsDirect(SpectralDirectParams { beta: 1, m: 2, n: 3, nu: 5.0, samples: 10_000, thin: 100 }));
        Self { suite: "default".into(), seed: 20_240_601, threshold: default_threshold(), tests }
    }
}
