use super::{qadd, qconj, qmul, qnorm_sqr, qscale, qsub, AlgebraTag, DivisionScalar, Quat, QZERO};
use crate::{Error, Result};

/// Dense `m × n` matrix over ℝ, ℂ or ℍ, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    tag: AlgebraTag,
    rows: usize,
    cols: usize,
    data: Vec<Quat>,
}

impl DenseMatrix {
    pub fn zeros(tag: AlgebraTag, rows: usize, cols: usize) -> Result<Self> {
        tag.require_associative()?;
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("matrix shape {rows}x{cols} is empty")));
        }
        Ok(Self { tag, rows, cols, data: vec![QZERO; rows * cols] })
    }

    pub fn identity(tag: AlgebraTag, dim: usize) -> Result<Self> {
        let mut out = Self::zeros(tag, dim, dim)?;
        for i in 0..dim {
            out.data[i * dim + i][0] = 1.0;
        }
        Ok(out)
    }

    /// Builds a real-coefficient matrix (embedded in `tag`) from row-major values.
    pub fn from_real(tag: AlgebraTag, rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} values for a {rows}x{cols} matrix",
                values.len()
            )));
        }
        let mut out = Self::zeros(tag, rows, cols)?;
        for (d, v) in out.data.iter_mut().zip(values) {
            d[0] = *v;
        }
        Ok(out)
    }

    /// Builds a matrix from row-major scalars given as coefficient slices of
    /// length `β`.
    pub fn from_coeffs(tag: AlgebraTag, rows: usize, cols: usize, entries: &[&[f64]]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let mut out = Self::zeros(tag, rows, cols)?;
        for (d, e) in out.data.iter_mut().zip(entries) {
            let s = DivisionScalar::new(tag, e)?;
            *d = s.to_quat();
        }
        Ok(out)
    }

    pub(crate) fn from_quats(tag: AlgebraTag, rows: usize, cols: usize, data: Vec<Quat>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { tag, rows, cols, data }
    }

    pub fn tag(&self) -> AlgebraTag {
        self.tag
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> DivisionScalar {
        DivisionScalar::from_quat(self.tag, &self.data[i * self.cols + j])
    }

    pub fn set(&mut self, i: usize, j: usize, value: &DivisionScalar) -> Result<()> {
        if value.tag() != self.tag {
            return Err(Error::Dimension(format!(
                "cannot store a {} scalar in a {} matrix",
                value.tag(),
                self.tag
            )));
        }
        self.data[i * self.cols + j] = value.to_quat();
        Ok(())
    }

    #[inline]
    pub(crate) fn q(&self, i: usize, j: usize) -> &Quat {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn q_mut(&mut self, i: usize, j: usize) -> &mut Quat {
        &mut self.data[i * self.cols + j]
    }

    pub(crate) fn quats(&self) -> &[Quat] {
        &self.data
    }

    pub(crate) fn quats_mut(&mut self) -> &mut [Quat] {
        &mut self.data
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        matmul(self, other)
    }

    pub fn adjoint(&self) -> DenseMatrix {
        adjoint(self)
    }

    fn check_same_shape(&self, other: &DenseMatrix) -> Result<()> {
        if self.tag != other.tag || self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} ({}) vs {}x{} ({})",
                self.rows, self.cols, self.tag, other.rows, other.cols, other.tag
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| qadd(a, b)).collect();
        Ok(Self::from_quats(self.tag, self.rows, self.cols, data))
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| qsub(a, b)).collect();
        Ok(Self::from_quats(self.tag, self.rows, self.cols, data))
    }

    pub fn scale(&self, s: f64) -> DenseMatrix {
        let data = self.data.iter().map(|a| qscale(a, s)).collect();
        Self::from_quats(self.tag, self.rows, self.cols, data)
    }

    /// Frobenius norm over all real coefficients.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(qnorm_sqr).sum::<f64>().sqrt()
    }

    /// `tr(A A*)`, the squared Frobenius norm.
    pub fn trace_gram(&self) -> f64 {
        self.data.iter().map(qnorm_sqr).sum()
    }

    /// Real part of the trace of a square matrix.
    pub fn trace_re(&self) -> Result<f64> {
        if self.rows != self.cols {
            return Err(Error::Dimension("trace of a non-square matrix".into()));
        }
        Ok((0..self.rows).map(|i| self.q(i, i)[0]).sum())
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| qnorm_sqr(&qsub(a, b)).sqrt())
            .fold(0.0, f64::max))
    }

    /// Coefficients as an `m × n × β` nested array (interchange layout).
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        let b = self.tag.beta();
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.q(i, j)[..b].to_vec()).collect())
            .collect()
    }
}

/// Matrix product with algebra scalar multiplication.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.tag != b.tag {
        return Err(Error::Dimension(format!("matmul across algebras ({} vs {})", a.tag, b.tag)));
    }
    if a.cols != b.rows {
        return Err(Error::Dimension(format!(
            "matmul of {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut data = vec![QZERO; a.rows * b.cols];
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.q(i, k);
            for j in 0..b.cols {
                let p = qmul(aik, b.q(k, j));
                let d = &mut data[i * b.cols + j];
                *d = qadd(d, &p);
            }
        }
    }
    Ok(DenseMatrix::from_quats(a.tag, a.rows, b.cols, data))
}

/// Conjugate transpose.
pub fn adjoint(a: &DenseMatrix) -> DenseMatrix {
    let mut data = vec![QZERO; a.rows * a.cols];
    for i in 0..a.rows {
        for j in 0..a.cols {
            data[j * a.rows + i] = qconj(a.q(i, j));
        }
    }
    DenseMatrix::from_quats(a.tag, a.cols, a.rows, data)
}

/// `A A*`. The result is positive semidefinite; it is positive definite
/// exactly when `A` has full row rank.
pub fn gram(a: &DenseMatrix) -> HermitianPD {
    let m = a.rows;
    let mut lower = Vec::with_capacity(m * (m + 1) / 2);
    for i in 0..m {
        for j in 0..=i {
            let mut acc = QZERO;
            for k in 0..a.cols {
                acc = qadd(&acc, &qmul(a.q(i, k), &qconj(a.q(j, k))));
            }
            if i == j {
                acc = [acc[0], 0.0, 0.0, 0.0];
            }
            lower.push(acc);
        }
    }
    HermitianPD { tag: a.tag, dim: m, lower }
}

/// `A* A`, the reverse Gram matrix.
pub fn gram_adjoint(a: &DenseMatrix) -> HermitianPD {
    gram(&adjoint(a))
}

/// Hermitian matrix over ℝ, ℂ or ℍ stored as its lower triangle.
///
/// The diagonal is real by construction and `entry(j, i) = conj(entry(i, j))`
/// holds exactly. Positive definiteness is checked by the operations that
/// need it (Cholesky, log-determinants, density evaluators).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianPD {
    tag: AlgebraTag,
    dim: usize,
    lower: Vec<Quat>,
}

/// Relative tolerance for accepting a dense matrix as Hermitian.
const HERMITIAN_TOL: f64 = 1e-10;

impl HermitianPD {
    pub fn identity(tag: AlgebraTag, dim: usize) -> Result<Self> {
        Self::diagonal(tag, &vec![1.0; dim])
    }

    pub fn diagonal(tag: AlgebraTag, diag: &[f64]) -> Result<Self> {
        tag.require_associative()?;
        if diag.is_empty() {
            return Err(Error::Dimension("empty Hermitian matrix".into()));
        }
        let dim = diag.len();
        let mut lower = vec![QZERO; dim * (dim + 1) / 2];
        for (i, d) in diag.iter().enumerate() {
            lower[i * (i + 1) / 2 + i][0] = *d;
        }
        Ok(Self { tag, dim, lower })
    }

    /// Accepts a square dense matrix that is Hermitian to within a relative
    /// tolerance of 1e-10; the stored matrix is its lower triangle.
    pub fn from_dense(a: &DenseMatrix) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::Dimension(format!(
                "Hermitian matrix must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let scale = a.quats().iter().map(|q| qnorm_sqr(q).sqrt()).fold(1.0, f64::max);
        let m = a.rows();
        for i in 0..m {
            for j in 0..=i {
                let d = qsub(a.q(i, j), &qconj(a.q(j, i)));
                if qnorm_sqr(&d).sqrt() > HERMITIAN_TOL * scale {
                    return Err(Error::Parameter(format!(
                        "matrix is not Hermitian at entry ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self::from_dense_lower(a))
    }

    /// Takes the lower triangle without checking the upper one.
    pub(crate) fn from_dense_lower(a: &DenseMatrix) -> Self {
        let m = a.rows();
        let mut lower = Vec::with_capacity(m * (m + 1) / 2);
        for i in 0..m {
            for j in 0..i {
                lower.push(*a.q(i, j));
            }
            lower.push([a.q(i, i)[0], 0.0, 0.0, 0.0]);
        }
        Self { tag: a.tag(), dim: m, lower }
    }

    pub fn tag(&self) -> AlgebraTag {
        self.tag
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub(crate) fn q(&self, i: usize, j: usize) -> Quat {
        if j <= i {
            self.lower[i * (i + 1) / 2 + j]
        } else {
            qconj(&self.lower[j * (j + 1) / 2 + i])
        }
    }

    pub fn get(&self, i: usize, j: usize) -> DivisionScalar {
        DivisionScalar::from_quat(self.tag, &self.q(i, j))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let m = self.dim;
        let mut data = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                data.push(self.q(i, j));
            }
        }
        DenseMatrix::from_quats(self.tag, m, m, data)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.q(i, i)[0]).sum()
    }

    pub fn scale(&self, s: f64) -> HermitianPD {
        Self {
            tag: self.tag,
            dim: self.dim,
            lower: self.lower.iter().map(|q| qscale(q, s)).collect(),
        }
    }

    pub fn add(&self, other: &HermitianPD) -> Result<HermitianPD> {
        if self.tag != other.tag || self.dim != other.dim {
            return Err(Error::Dimension("Hermitian sum of mismatched matrices".into()));
        }
        Ok(Self {
            tag: self.tag,
            dim: self.dim,
            lower: self.lower.iter().zip(&other.lower).map(|(a, b)| qadd(a, b)).collect(),
        })
    }

    pub fn sub(&self, other: &HermitianPD) -> Result<HermitianPD> {
        self.add(&other.scale(-1.0))
    }

    /// `I − self`.
    pub fn complement(&self) -> HermitianPD {
        let mut out = self.scale(-1.0);
        for i in 0..self.dim {
            out.lower[i * (i + 1) / 2 + i][0] += 1.0;
        }
        out
    }

    /// `A self A*` for a dense `A` with `A.cols() == dim`.
    pub fn congruence(&self, a: &DenseMatrix) -> Result<HermitianPD> {
        let prod = matmul(&matmul(a, &self.to_dense())?, &adjoint(a))?;
        Ok(Self::from_dense_lower(&prod))
    }
}
