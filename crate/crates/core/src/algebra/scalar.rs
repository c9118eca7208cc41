use super::{AlgebraTag, Quat};
use crate::{Error, Result};

/// An element of ℝ, ℂ, ℍ or 𝕆 stored as its `β` real coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivisionScalar {
    tag: AlgebraTag,
    coeffs: [f64; 8],
}

impl DivisionScalar {
    pub fn new(tag: AlgebraTag, coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() != tag.beta() {
            return Err(Error::Dimension(format!(
                "{tag} scalar needs {} coefficients, got {}",
                tag.beta(),
                coeffs.len()
            )));
        }
        let mut c = [0.0; 8];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Self { tag, coeffs: c })
    }

    pub fn zero(tag: AlgebraTag) -> Self {
        Self { tag, coeffs: [0.0; 8] }
    }

    pub fn real(tag: AlgebraTag, x: f64) -> Self {
        let mut coeffs = [0.0; 8];
        coeffs[0] = x;
        Self { tag, coeffs }
    }

    /// The `k`-th basis unit (`e₀ = 1`).
    pub fn basis(tag: AlgebraTag, k: usize) -> Result<Self> {
        if k >= tag.beta() {
            return Err(Error::Dimension(format!("basis index {k} out of range for {tag}")));
        }
        let mut coeffs = [0.0; 8];
        coeffs[k] = 1.0;
        Ok(Self { tag, coeffs })
    }

    pub(crate) fn from_quat(tag: AlgebraTag, q: &Quat) -> Self {
        let mut coeffs = [0.0; 8];
        let b = tag.beta().min(4);
        coeffs[..b].copy_from_slice(&q[..b]);
        Self { tag, coeffs }
    }

    pub(crate) fn to_quat(self) -> Quat {
        [self.coeffs[0], self.coeffs[1], self.coeffs[2], self.coeffs[3]]
    }

    pub fn tag(&self) -> AlgebraTag {
        self.tag
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..self.tag.beta()]
    }

    pub fn re(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn conj(&self) -> Self {
        let mut out = *self;
        for c in out.coeffs[1..].iter_mut() {
            *c = -*c;
        }
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs().iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same(self, other)?;
        let mut out = *self;
        for (o, b) in out.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *o += b;
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for c in out.coeffs.iter_mut() {
            *c *= s;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        mul_scalars(self, other)
    }
}

fn check_same(a: &DivisionScalar, b: &DivisionScalar) -> Result<()> {
    if a.tag != b.tag {
        return Err(Error::Dimension(format!(
            "scalars from different algebras ({} vs {})",
            a.tag, b.tag
        )));
    }
    Ok(())
}

/// Algebra product. For `β = 8` this is the octonion product obtained by
/// Cayley–Dickson doubling of the quaternions with
/// `(p, q)(r, s) = (pr − s̄q, sp + q r̄)`; it is alternative but not
/// associative.
pub fn mul_scalars(a: &DivisionScalar, b: &DivisionScalar) -> Result<DivisionScalar> {
    check_same(a, b)?;
    let n = a.tag.beta();
    let mut out = [0.0; 8];
    cayley_dickson_mul(&a.coeffs[..n], &b.coeffs[..n], &mut out[..n]);
    Ok(DivisionScalar { tag: a.tag, coeffs: out })
}

fn conj_into(x: &[f64], out: &mut [f64]) {
    out[0] = x[0];
    for (o, v) in out[1..].iter_mut().zip(&x[1..]) {
        *o = -v;
    }
}

fn cayley_dickson_mul(a: &[f64], b: &[f64], out: &mut [f64]) {
    let n = a.len();
    if n == 1 {
        out[0] = a[0] * b[0];
        return;
    }
    let h = n / 2;
    let (p, q) = a.split_at(h);
    let (r, s) = b.split_at(h);

    let mut s_bar = [0.0; 4];
    let mut r_bar = [0.0; 4];
    conj_into(s, &mut s_bar[..h]);
    conj_into(r, &mut r_bar[..h]);

    let mut t1 = [0.0; 4];
    let mut t2 = [0.0; 4];
    cayley_dickson_mul(p, r, &mut t1[..h]);
    cayley_dickson_mul(&s_bar[..h], q, &mut t2[..h]);
    for i in 0..h {
        out[i] = t1[i] - t2[i];
    }
    cayley_dickson_mul(s, p, &mut t1[..h]);
    cayley_dickson_mul(q, &r_bar[..h], &mut t2[..h]);
    for i in 0..h {
        out[h + i] = t1[i] + t2[i];
    }
}
