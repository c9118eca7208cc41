//! The `matvar` command line.
//!
//! ```text
//! matvar sample   --dist pearson2 --beta 1 --m 2 --n 3 --nu 4 --count 100 --seed 7 --out draws.jsonl
//! matvar density  --input draws.jsonl
//! matvar verify   [--config suite.json] [--out report.json] [--seed S] [--jobs J]
//! matvar tabulate --row beta=1,m=2,n=3,a=1.5,b=2 [--grid rows.json] [--out table.csv]
//! ```
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage,
//! parameter or schema errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{AlgebraTag, DenseMatrix, HermitianPD, MatrixJson};
use crate::densities::{
    beta1_logpdf, mmbeta1_logpdf, mmpearson2_logpdf, pearson2_logpdf, spectral_logpdf, BetaIParams,
    PearsonIIParams, PearsonKind, SpectralConfig, SpectralFlavor,
};
use crate::samplers::{
    sample_beta1, sample_mmpearson2, sample_normal, sample_pearson2, sample_spectral, sample_wishart, BetaFlavor,
    EllipticalGenerator, McmcOptions, PearsonConstruction, RngStream, WishartParams,
};
use crate::special::{log_mbeta, log_mgamma, log_stiefel_volume};
use crate::verify::{run_suite, SuiteConfig};
use crate::{Error, Result, FORMAT_VERSION, VERSION};

#[derive(Debug, Parser)]
#[command(name = "matvar", version, about = "Pearson type II and beta type I matrix distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw samples and write them as JSON lines.
    Sample(SampleArgs),
    /// Evaluate a log-density.
    Density(DensityArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Tabulate multivariate gamma, beta and Stiefel volume logarithms.
    Tabulate(TabulateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dist {
    Pearson2,
    Mmpearson2,
    Beta1,
    Mmbeta1,
    Wishart,
    Normal,
    Spectral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionArg {
    Row,
    Column,
    EllipticalNormal,
    EllipticalT,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum FlavorArg {
    SingularPearson,
    SingularMm,
    EigenBeta,
    EigenMm,
}

impl From<FlavorArg> for SpectralFlavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::SingularPearson => SpectralFlavor::SingularPearson,
            FlavorArg::SingularMm => SpectralFlavor::SingularMm,
            FlavorArg::EigenBeta => SpectralFlavor::EigenBeta,
            FlavorArg::EigenMm => SpectralFlavor::EigenMm,
        }
    }
}

/// Distribution parameters shared by `sample` and `density`. Unset values
/// are filled from a sample file header where one is read.
#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
pub struct DistArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<Dist>,
    /// Algebra dimension: 1, 2 or 4 (any real > 0 for spectral).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flavor: Option<FlavorArg>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionArg>,
    /// Degrees of freedom of the matrix-t generator.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub df: Option<f64>,
    /// JSON file with optional `mu`, `scale_left`, `scale_right` matrices.
    #[arg(long)]
    #[serde(skip)]
    pub params: Option<PathBuf>,
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location_scale: Option<LocationScale>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationScale {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_left: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_right: Option<MatrixJson>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 10)]
    pub thin: usize,
    #[arg(long)]
    pub step_size: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    /// A matrix or spectral JSON file, or a JSONL sample file.
    #[arg(long, conflicts_with_all = ["matrix", "values"])]
    pub input: Option<PathBuf>,
    /// Inline matrix JSON.
    #[arg(long)]
    pub matrix: Option<String>,
    /// Inline comma-separated spectral values.
    #[arg(long)]
    pub values: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite configuration; the default suite when absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the configuration's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TabulateArgs {
    /// A grid row such as `beta=1,m=2,n=3,a=1.5,b=2`; repeatable.
    #[arg(long = "row")]
    pub rows: Vec<String>,
    /// JSON array of rows with keys beta, m, n, a, b.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Diagnostics(_) | Error::NoConvergence { .. } | Error::Consistency(_) => 1,
        _ => 2,
    }
}

/// Runs a parsed command, writing primary output to `out`.
pub fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Sample(a) => cmd_sample(a, out).map(|_| 0),
        Command::Density(a) => cmd_density(a, out).map(|_| 0),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Tabulate(a) => cmd_tabulate(a, out).map(|_| 0),
    }
}

fn missing(name: &str) -> Error {
    Error::Parameter(format!("--{name} is required"))
}

fn open_output(path: &Option<PathBuf>, out: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = io::BufWriter::new(fs::File::create(p)?);
            body(&mut f)?;
            f.flush()?;
            Ok(())
        }
        None => body(out),
    }
}

impl DistArgs {
    fn load_location_scale(&mut self) -> Result<()> {
        if let Some(p) = &self.params {
            let text = fs::read_to_string(p)?;
            self.location_scale = Some(serde_json::from_str(&text)?);
        }
        Ok(())
    }

    /// Fills unset fields from `other`; a conflicting `beta` is an error.
    fn merge_from(&mut self, other: &DistArgs) -> Result<()> {
        if let (Some(a), Some(b)) = (self.beta, other.beta) {
            if a != b {
                return Err(Error::Parameter(format!("beta {a} given, but the input has beta {b}")));
            }
        }
        macro_rules! fill {
            ($($f:ident),*) => { $( if self.$f.is_none() { self.$f = other.$f.clone(); } )* };
        }
        fill!(dist, beta, m, n, nu, flavor, construction, df, location_scale);
        Ok(())
    }

    fn dist(&self) -> Result<Dist> {
        self.dist.ok_or_else(|| missing("dist"))
    }

    fn nu(&self) -> Result<f64> {
        self.nu.ok_or_else(|| missing("nu"))
    }

    fn tag(&self) -> Result<AlgebraTag> {
        let beta = self.beta.ok_or_else(|| missing("beta"))?;
        if beta == 8.0 {
            return Err(Error::Unsupported("octonion matrix sampling unsupported".into()));
        }
        if beta.fract() != 0.0 {
            return Err(Error::Parameter(format!("beta must be 1, 2 or 4 for matrix distributions, got {beta}")));
        }
        AlgebraTag::from_beta(beta as u32)
    }

    fn integer_n(&self) -> Result<usize> {
        let n = self.n.ok_or_else(|| missing("n"))?;
        if n.fract() != 0.0 || n < 1.0 {
            return Err(Error::Parameter(format!("n must be a positive integer, got {n}")));
        }
        Ok(n as usize)
    }

    fn construction(&self) -> Result<PearsonConstruction> {
        Ok(match self.construction.unwrap_or(ConstructionArg::Row) {
            ConstructionArg::Row => PearsonConstruction::RowQuotient,
            ConstructionArg::Column => PearsonConstruction::ColumnQuotient,
            ConstructionArg::EllipticalNormal => {
                PearsonConstruction::Elliptical { generator: EllipticalGenerator::Normal }
            }
            ConstructionArg::EllipticalT => PearsonConstruction::Elliptical {
                generator: EllipticalGenerator::matrix_t(self.df.ok_or_else(|| missing("df"))?)?,
            },
        })
    }

    fn hermitian(&self, tag: AlgebraTag, which: Option<&MatrixJson>, dim: usize) -> Result<HermitianPD> {
        match which {
            Some(j) => {
                let h = HermitianPD::from_dense(&j.to_matrix()?)?;
                if h.tag() != tag || h.dim() != dim {
                    return Err(Error::Dimension(format!("scale must be a {dim}x{dim} matrix over {tag}")));
                }
                Ok(h)
            }
            None => HermitianPD::identity(tag, dim),
        }
    }

    fn pearson_params(&self, kind: PearsonKind, tag: AlgebraTag, m: usize, n: usize) -> Result<PearsonIIParams> {
        let ls = self.location_scale.clone().unwrap_or_default();
        let mu = match &ls.mu {
            Some(j) => j.to_matrix()?,
            None => DenseMatrix::zeros(tag, m, n)?,
        };
        PearsonIIParams::new(
            kind,
            self.nu()?,
            mu,
            self.hermitian(tag, ls.scale_left.as_ref(), m)?,
            self.hermitian(tag, ls.scale_right.as_ref(), n)?,
        )
    }

    fn spectral_template(&self) -> Result<SpectralConfig> {
        let beta = self.beta.ok_or_else(|| missing("beta"))?;
        let m = self.m.ok_or_else(|| missing("m"))?;
        let n = self.n.ok_or_else(|| missing("n"))?;
        let flavor = self.flavor.unwrap_or(FlavorArg::SingularPearson).into();
        Ok(SpectralConfig::new(vec![0.0; m], n, self.nu()?, beta, flavor))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    kind: String,
    format_version: u32,
    version: String,
    seed: u64,
    count: usize,
    params: DistArgs,
    conventions: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mcmc: Option<Value>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpectralLine {
    #[serde(default = "format_version")]
    format_version: u32,
    #[serde(flatten)]
    config: SpectralConfig,
}

fn format_version() -> u32 {
    FORMAT_VERSION
}

fn conventions(d: &DistArgs) -> Value {
    let mut c = json!({
        "gaussian_coefficient_variance": "1/beta",
        "wishart": "Gram of an m x nu standardized Gaussian; E[U] = nu * sigma",
        "chi2beta": "Gamma(shape beta*nu/2, rate beta/2)",
        "entries": "row-major, each entry a list of beta real coefficients",
    });
    match d.dist {
        Some(Dist::Pearson2) => {
            c["affine_map"] = json!("Q = (M*)^-1 R N* + mu, scale_left = M M*, scale_right = N N*");
            c["generator"] = json!(match d.construction.unwrap_or(ConstructionArg::Row) {
                ConstructionArg::EllipticalT => "matrix-t scale mixture with real chi-square mixing",
                ConstructionArg::EllipticalNormal => "normal",
                _ => "none",
            });
        }
        Some(Dist::Mmpearson2) => {
            c["affine_map"] = json!("Q = (M*)^-1 R N^-1 + mu, scale_left = M M*, scale_right = N N*");
        }
        _ => {}
    }
    c
}

fn write_line(out: &mut dyn Write, v: &impl Serialize) -> Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn cmd_sample(mut a: SampleArgs, out: &mut dyn Write) -> Result<()> {
    a.dist.load_location_scale()?;
    let d = &a.dist;
    let dist = d.dist()?;
    let mut rng = RngStream::new(a.seed);
    let mut lines: Vec<Value> = Vec::with_capacity(a.count);
    let mut mcmc = None;
    match dist {
        Dist::Spectral => {
            let template = d.spectral_template()?;
            let opts = McmcOptions { burn_in: a.burn_in, thin: a.thin, step_size: a.step_size };
            let chain = sample_spectral(&mut rng, &template, a.count, &opts)?;
            mcmc = Some(json!({
                "burn_in": a.burn_in,
                "thin": a.thin,
                "step_size": chain.step_size,
                "acceptance_rate": chain.acceptance_rate,
            }));
            for values in chain.draws {
                let config = SpectralConfig { values, ..template.clone() };
                lines.push(serde_json::to_value(SpectralLine { format_version: FORMAT_VERSION, config })?);
            }
        }
        Dist::Pearson2 | Dist::Mmpearson2 => {
            let tag = d.tag()?;
            let m = d.m.ok_or_else(|| missing("m"))?;
            let n = d.integer_n()?;
            if dist == Dist::Pearson2 {
                let p = d.pearson_params(PearsonKind::Matricvariate, tag, m, n)?;
                let c = d.construction()?;
                for _ in 0..a.count {
                    lines.push(serde_json::to_value(MatrixJson::from_matrix(&sample_pearson2(&mut rng, &p, c)?))?);
                }
            } else {
                let p = d.pearson_params(PearsonKind::MatrixMultivariate, tag, m, n)?;
                for _ in 0..a.count {
                    lines.push(serde_json::to_value(MatrixJson::from_matrix(&sample_mmpearson2(&mut rng, &p)?))?);
                }
            }
        }
        Dist::Beta1 | Dist::Mmbeta1 => {
            let tag = d.tag()?;
            let p = BetaIParams::new(tag, d.m.ok_or_else(|| missing("m"))?, d.n.ok_or_else(|| missing("n"))?, d.nu()?)?;
            let flavor = if dist == Dist::Beta1 { BetaFlavor::Matricvariate } else { BetaFlavor::MatrixMultivariate };
            for _ in 0..a.count {
                lines.push(serde_json::to_value(MatrixJson::from_hermitian(&sample_beta1(&mut rng, &p, flavor)?))?);
            }
        }
        Dist::Wishart => {
            let tag = d.tag()?;
            let m = d.m.ok_or_else(|| missing("m"))?;
            let ls = d.location_scale.clone().unwrap_or_default();
            let p = WishartParams::new(d.nu()?, d.hermitian(tag, ls.scale_left.as_ref(), m)?)?;
            for _ in 0..a.count {
                lines.push(serde_json::to_value(MatrixJson::from_hermitian(&sample_wishart(&mut rng, &p)?))?);
            }
        }
        Dist::Normal => {
            let tag = d.tag()?;
            let m = d.m.ok_or_else(|| missing("m"))?;
            let n = d.integer_n()?;
            let ls = d.location_scale.clone().unwrap_or_default();
            let left = d.hermitian(tag, ls.scale_left.as_ref(), m)?;
            let right = d.hermitian(tag, ls.scale_right.as_ref(), n)?;
            for _ in 0..a.count {
                lines.push(serde_json::to_value(MatrixJson::from_matrix(&sample_normal(&mut rng, &left, &right)?))?);
            }
        }
    }
    let header = Header {
        kind: "header".into(),
        format_version: FORMAT_VERSION,
        version: VERSION.into(),
        seed: a.seed,
        count: a.count,
        params: a.dist.clone(),
        conventions: conventions(&a.dist),
        mcmc,
    };
    open_output(&a.out, out, |w| {
        write_line(w, &header)?;
        for l in &lines {
            write_line(w, l)?;
        }
        Ok(())
    })
}

enum Point {
    Matrix(MatrixJson),
    Spectral(SpectralConfig),
}

fn parse_point(v: Value) -> Result<Point> {
    if v.get("values").is_some() {
        let line: SpectralLine = serde_json::from_value(v).map_err(|e| Error::Parameter(format!("spectral input: {e}")))?;
        Ok(Point::Spectral(line.config))
    } else {
        let m: MatrixJson = serde_json::from_value(v).map_err(|e| Error::Parameter(format!("matrix input: {e}")))?;
        Ok(Point::Matrix(m))
    }
}

fn read_points(path: &Path, args: &mut DistArgs) -> Result<Vec<Point>> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut points = Vec::new();
    let mut text = String::new();
    let mut lines = Vec::new();
    for line in reader.lines() {
        let line = line?;
        text.push_str(&line);
        text.push('\n');
        if !line.trim().is_empty() {
            lines.push(line);
        }
    }
    let first: Option<Value> = lines.first().and_then(|l| serde_json::from_str(l).ok());
    match first {
        Some(v) if v.get("kind").and_then(Value::as_str) == Some("header") => {
            let header: Header = serde_json::from_value(v)?;
            args.merge_from(&header.params)?;
            for l in &lines[1..] {
                points.push(parse_point(serde_json::from_str(l)?)?);
            }
        }
        Some(_) if lines.len() > 1 => {
            for l in &lines {
                points.push(parse_point(serde_json::from_str(l)?)?);
            }
        }
        _ => points.push(parse_point(serde_json::from_str(&text)?)?),
    }
    Ok(points)
}

fn logpdf_json(v: f64) -> Value {
    if v == f64::NEG_INFINITY {
        json!({ "logpdf": "-inf" })
    } else {
        json!({ "logpdf": v })
    }
}

fn matrix_logpdf(d: &DistArgs, mj: &MatrixJson) -> Result<f64> {
    if let Some(b) = d.beta {
        if b != mj.beta as f64 {
            return Err(Error::Parameter(format!("beta {b} given, but the input matrix has beta {}", mj.beta)));
        }
    }
    let x = mj.to_matrix()?;
    let tag = x.tag();
    match d.dist()? {
        Dist::Pearson2 => pearson2_logpdf(&x, &d.pearson_params(PearsonKind::Matricvariate, tag, x.rows(), x.cols())?),
        Dist::Mmpearson2 => {
            mmpearson2_logpdf(&x, &d.pearson_params(PearsonKind::MatrixMultivariate, tag, x.rows(), x.cols())?)
        }
        dist @ (Dist::Beta1 | Dist::Mmbeta1) => {
            let b = HermitianPD::from_dense(&x)?;
            let m = d.m.unwrap_or(b.dim());
            let n = d.n.ok_or_else(|| missing("n"))?;
            let p = BetaIParams::new(tag, m, n, d.nu()?)?;
            if dist == Dist::Beta1 {
                beta1_logpdf(&b, &p)
            } else {
                mmbeta1_logpdf(&b, &p)
            }
        }
        other => Err(Error::Unsupported(format!("no density evaluator for {other:?}"))),
    }
}

fn spectral_point_logpdf(d: &DistArgs, c: &SpectralConfig) -> Result<f64> {
    if let Some(b) = d.beta {
        if b != c.beta {
            return Err(Error::Parameter(format!("beta {b} given, but the input has beta {}", c.beta)));
        }
    }
    spectral_logpdf(c)
}

fn cmd_density(mut a: DensityArgs, out: &mut dyn Write) -> Result<()> {
    a.dist.load_location_scale()?;
    let points = if let Some(path) = &a.input {
        read_points(path, &mut a.dist)?
    } else if let Some(text) = &a.matrix {
        vec![parse_point(serde_json::from_str(text)?)?]
    } else if let Some(text) = &a.values {
        let values = text
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parameter(format!("value {s:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        let t = a.dist.spectral_template()?;
        vec![Point::Spectral(SpectralConfig { values, ..t })]
    } else {
        return Err(Error::Parameter("one of --input, --matrix or --values is required".into()));
    };
    for p in &points {
        let v = match p {
            Point::Matrix(mj) => matrix_logpdf(&a.dist, mj)?,
            Point::Spectral(c) => spectral_point_logpdf(&a.dist, c)?,
        };
        write_line(out, &logpdf_json(v))?;
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let mut config = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p)?;
            serde_json::from_str::<SuiteConfig>(&text).map_err(|e| Error::Config(e.to_string()))?
        }
        None => SuiteConfig::default_suite(),
    };
    if let Some(s) = a.seed {
        config.seed = s;
    }
    let report = run_suite(&config, a.jobs)?;
    match &a.out {
        Some(p) => {
            fs::write(p, serde_json::to_string_pretty(&report)?)?;
            for r in &report.reports {
                let measure = match (r.p_value, r.abs_error) {
                    (Some(p), _) => format!("p = {p:.4}"),
                    (_, Some(e)) => format!("error = {e:.3e}"),
                    _ => r.error.clone().unwrap_or_default(),
                };
                writeln!(out, "{} {} ({measure}, threshold {})", if r.passed { "PASS" } else { "FAIL" }, r.name, r.threshold)?;
            }
            writeln!(out, "{}", if report.passed { "suite passed" } else { "suite FAILED" })?;
        }
        None => {
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
        }
    }
    Ok(if report.passed { 0 } else { 1 })
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRow {
    pub beta: f64,
    pub m: usize,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
}

fn parse_row(text: &str) -> Result<GridRow> {
    let mut obj = serde_json::Map::new();
    for part in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parameter(format!("row entry {part:?} is not key=value")))?;
        let num: f64 = v.trim().parse().map_err(|e| Error::Parameter(format!("{k}: {e}")))?;
        let value = match k.trim() {
            "m" | "n" if num.fract() == 0.0 && num >= 0.0 => json!(num as u64),
            _ => json!(num),
        };
        obj.insert(k.trim().to_string(), value);
    }
    serde_json::from_value(Value::Object(obj)).map_err(|e| Error::Parameter(format!("row {text:?}: {e}")))
}

/// One CSV line for a grid row; failures become `DOMAIN_ERROR` cells.
pub fn tabulate_row(r: &GridRow) -> String {
    let cell = |v: Option<Result<f64>>| match v {
        None => String::new(),
        Some(Ok(x)) => format!("{x}"),
        Some(Err(_)) => "DOMAIN_ERROR".into(),
    };
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let g = r.a.map(|a| log_mgamma(r.beta, r.m, a).map(|v| v.value()));
    let b = match (r.a, r.b) {
        (Some(a), Some(b)) => Some(log_mbeta(r.beta, r.m, a, b).map(|v| v.value())),
        _ => None,
    };
    let vol = r.n.map(|n| log_stiefel_volume(r.beta, r.m, n).map(|v| v.value()));
    format!(
        "{},{},{},{},{},{},{},{}",
        r.beta,
        r.m,
        r.n.map(|n| n.to_string()).unwrap_or_default(),
        opt(r.a),
        opt(r.b),
        cell(g),
        cell(b),
        cell(vol)
    )
}

fn cmd_tabulate(a: TabulateArgs, out: &mut dyn Write) -> Result<()> {
    let mut rows = Vec::new();
    if let Some(p) = &a.grid {
        let text = fs::read_to_string(p)?;
        rows.extend(serde_json::from_str::<Vec<GridRow>>(&text)?);
    }
    for r in &a.rows {
        rows.push(parse_row(r)?);
    }
    if rows.is_empty() {
        return Err(Error::Parameter("no grid rows given (use --row or --grid)".into()));
    }
    open_output(&a.out, out, |w| {
        writeln!(w, "beta,m,n,a,b,log_mgamma,log_mbeta,log_stiefel_volume")?;
        for r in &rows {
            writeln!(w, "{}", tabulate_row(r))?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_to_string(args: &[&str]) -> Result<(i32, String)> {
        let cli = Cli::try_parse_from(std::iter::once("matvar").chain(args.iter().copied()))
            .map_err(|e| Error::Parameter(e.to_string()))?;
        let mut buf = Vec::new();
        let code = execute(cli.command, &mut buf)?;
        Ok((code, String::from_utf8(buf).unwrap()))
    }

    #[test]
    fn tabulate_rows() {
        let (_, out) = run_to_string(&["tabulate", "--row", "beta=1,m=1,n=2", "--row", "beta=1,m=1,a=0", "--row", "beta=2,m=2,a=2,b=3"]).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 4);
        let vol: f64 = lines[1].rsplit(',').next().unwrap().parse().unwrap();
        assert!((vol - (2.0 * std::f64::consts::PI).ln()).abs() < 1e-12);
        assert!(lines[2].contains("DOMAIN_ERROR"));
        assert!(!lines[3].contains("DOMAIN_ERROR"));
    }

    #[test]
    fn sample_scalar_pearson_is_deterministic() {
        let args = ["sample", "--dist", "pearson2", "--beta", "1", "--m", "1", "--n", "1", "--nu", "2", "--count", "3", "--seed", "7"];
        let (_, a) = run_to_string(&args).unwrap();
        let (_, b) = run_to_string(&args).unwrap();
        assert_eq!(a, b);
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(lines.len(), 4);
        for l in &lines[1..] {
            let m: MatrixJson = serde_json::from_str(l).unwrap();
            let x = m.entries[0][0][0];
            assert!(x > -1.0 && x < 1.0);
        }
    }

    #[test]
    fn octonion_matrix_sampling_is_refused() {
        let err = run_to_string(&["sample", "--dist", "pearson2", "--beta", "8", "--m", "1", "--n", "1", "--nu", "2"]).unwrap_err();
        assert!(err.to_string().contains("octonion matrix sampling unsupported"));
        assert_eq!(exit_code(&err), 2);
        let (_, out) = run_to_string(&[
            "sample", "--dist", "spectral", "--beta", "8", "--m", "2", "--n", "3", "--nu", "12", "--count", "5",
        ])
        .unwrap();
        assert_eq!(out.lines().count(), 6);
    }

    #[test]
    fn density_inline_matrix() {
        let (_, out) = run_to_string(&[
            "density", "--dist", "pearson2", "--beta", "1", "--nu", "2", "--matrix",
            r#"{"beta": 1, "m": 1, "n": 1, "entries": [[[0.3]]]}"#,
        ])
        .unwrap();
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert!((v["logpdf"].as_f64().unwrap() + 2f64.ln()).abs() < 1e-12);
        let (_, out) = run_to_string(&[
            "density", "--dist", "pearson2", "--beta", "1", "--nu", "2", "--matrix",
            r#"{"beta": 1, "m": 1, "n": 1, "entries": [[[1.5]]]}"#,
        ])
        .unwrap();
        assert_eq!(out.trim(), r#"{"logpdf":"-inf"}"#);
        let err = run_to_string(&[
            "density", "--dist", "pearson2", "--beta", "2", "--nu", "2", "--matrix",
            r#"{"beta": 1, "m": 1, "n": 1, "entries": [[[0.3]]]}"#,
        ])
        .unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn density_spectral_values() {
        let (_, out) = run_to_string(&[
            "density", "--dist", "spectral", "--beta", "1", "--m", "1", "--n", "2", "--nu", "3", "--values", "0.5",
        ])
        .unwrap();
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert!((v["logpdf"].as_f64().unwrap() - 1.299038105676658f64.ln()).abs() < 1e-9);
    }
}
