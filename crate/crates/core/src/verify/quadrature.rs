use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const GL_POINTS: usize = 20;
/// Bisections allowed before giving up.
const MAX_PIECES: usize = 4000;

/// A bisected interval with its two half-interval rules.
struct Piece {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integration domain for [`quadrature_normalize`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Rectangle { a: [f64; 2], b: [f64; 2] },
    /// Disk of the given radius about the origin, integrated in polar
    /// coordinates.
    Disk { radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMethod {
    Quadrature,
    ImportanceMc,
    UniformMc,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationEstimate {
    pub estimate: f64,
    /// Standard error of a Monte Carlo estimate; `None` for quadrature.
    pub std_error: Option<f64>,
    pub method: NormalizationMethod,
    /// Quadrature nodes or Monte Carlo points.
    pub evaluations: usize,
}

fn gauss_legendre() -> &'static ([f64; GL_POINTS], [f64; GL_POINTS]) {
    static RULE: OnceLock<([f64; GL_POINTS], [f64; GL_POINTS])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut x = [0.0; GL_POINTS];
        let mut w = [0.0; GL_POINTS];
        for i in 0..n {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        (x, w)
    })
}

/// Adaptive integrator over `[a, b]`: the interval whose 20-point
/// Gauss–Legendre estimate changes most under bisection is split until the
/// summed changes fall below `abs_tol`. The open rule never evaluates the endpoints, so
/// integrable endpoint singularities are allowed.
pub struct Integrator {
    pub abs_tol: f64,
    evaluations: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self { abs_tol: 1e-11, evaluations: 0 }
    }
}

impl Integrator {
    pub fn new(abs_tol: f64) -> Self {
        Self { abs_tol, evaluations: 0 }
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn rule(&mut self, f: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
        let (x, w) = gauss_legendre();
        let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
        let mut s = 0.0;
        for i in 0..GL_POINTS {
            s += w[i] * f(c + h * x[i])?;
        }
        self.evaluations += GL_POINTS;
        Ok(s * h)
    }

    pub fn integrate(&mut self, f: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let mut heap = BinaryHeap::new();
        let coarse = self.rule(f, a, b)?;
        heap.push(self.piece(f, a, b, coarse)?);
        let mut previous = coarse;
        for _ in 0..MAX_PIECES {
            let total: f64 = heap.iter().map(|p| p.value).sum();
            let error: f64 = heap.iter().map(|p| p.error).sum();
            if !total.is_finite() || !error.is_finite() {
                return Err(Error::NoConvergence { previous, last: total });
            }
            if error <= self.abs_tol.max(4.0 * f64::EPSILON * total.abs()) {
                return Ok(total);
            }
            let worst = heap.pop().expect("nonempty");
            let mid = (worst.a + worst.b) / 2.0;
            if !(worst.a < mid && mid < worst.b) {
                return Err(Error::NoConvergence { previous, last: total });
            }
            heap.push(self.piece(f, worst.a, mid, worst.left)?);
            heap.push(self.piece(f, mid, worst.b, worst.right)?);
            previous = total;
        }
        let last = heap.iter().map(|p| p.value).sum();
        Err(Error::NoConvergence { previous, last })
    }

    fn piece(&mut self, f: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64, coarse: f64) -> Result<Piece> {
        let mid = (a + b) / 2.0;
        let left = self.rule(f, a, mid)?;
        let right = self.rule(f, mid, b)?;
        let value = left + right;
        Ok(Piece { a, b, left, right, value, error: (value - coarse).abs() })
    }

    /// `∫ₐᵇ f` after the substitution `x = a + (b−a)(3t² − 2t³)`, which
    /// flattens power-law endpoint singularities.
    pub fn integrate_smoothed(&mut self, f: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
        let len = b - a;
        let mut g = |t: f64| -> Result<f64> {
            let jac = 6.0 * t * (1.0 - t) * len;
            let v = f(a + len * t * t * (3.0 - 2.0 * t))?;
            Ok(if v == 0.0 { 0.0 } else { v * jac })
        };
        self.integrate(&mut g, 0.0, 1.0)
    }
}

fn density(logpdf: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Result<f64> {
    let lp = logpdf(x);
    if lp.is_nan() || lp == f64::INFINITY {
        return Err(Error::Domain(format!("log-density is {lp} at {x:?}")));
    }
    Ok(lp.exp())
}

/// `∫ exp(logpdf)` over a one- or two-dimensional domain.
pub fn quadrature_normalize(logpdf: &dyn Fn(&[f64]) -> f64, domain: &Domain) -> Result<NormalizationEstimate> {
    let mut outer = Integrator::default();
    let mut inner_evals = 0usize;
    let estimate = match *domain {
        Domain::Interval { a, b } => outer.integrate_smoothed(&mut |x| density(logpdf, &[x]), a, b)?,
        Domain::Rectangle { a, b } => {
            let mut row = |x: f64| -> Result<f64> {
                let mut inner = Integrator::default();
                let v = inner.integrate_smoothed(&mut |y| density(logpdf, &[x, y]), a[1], b[1])?;
                inner_evals += inner.evaluations();
                Ok(v)
            };
            outer.integrate_smoothed(&mut row, a[0], b[0])?
        }
        Domain::Disk { radius } => {
            let mut ring = |r: f64| -> Result<f64> {
                let mut inner = Integrator::default();
                let v = match inner.integrate(&mut |t| density(logpdf, &[r * t.cos(), r * t.sin()]), 0.0, 2.0 * PI) {
                    // Near the rim the density is dominated by rounding in
                    // x² + y², so the error estimate stalls at noise level.
                    Err(Error::NoConvergence { previous, last })
                        if last.is_finite() && (last - previous).abs() <= 1e-9 * last.abs() + inner.abs_tol =>
                    {
                        last
                    }
                    other => other?,
                };
                inner_evals += inner.evaluations();
                Ok(r * v)
            };
            outer.integrate_smoothed(&mut ring, 0.0, radius)?
        }
    };
    Ok(NormalizationEstimate {
        estimate,
        std_error: None,
        method: NormalizationMethod::Quadrature,
        evaluations: outer.evaluations().max(inner_evals),
    })
}

/// Model CDF at each of the sorted `samples`, from cumulative quadrature of
/// `exp(logpdf)` over `[a, b]` normalized by its total.
pub fn quadrature_cdf(logpdf: &dyn Fn(f64) -> f64, a: f64, b: f64, sorted: &[f64]) -> Result<Vec<f64>> {
    let mut integ = Integrator::new(1e-12);
    let mut f = |x: f64| density(&|v: &[f64]| logpdf(v[0]), &[x]);
    let total = integ.integrate_smoothed(&mut f, a, b)?;
    let mut acc = 0.0;
    let mut prev = a;
    let mut out = Vec::with_capacity(sorted.len());
    for &x in sorted {
        let x = x.clamp(a, b);
        if x < prev {
            return Err(Error::Parameter("samples must be sorted".into()));
        }
        acc += integ.integrate_smoothed(&mut f, prev, x)?;
        prev = x;
        out.push((acc / total).clamp(0.0, 1.0));
    }
    Ok(out)
}
