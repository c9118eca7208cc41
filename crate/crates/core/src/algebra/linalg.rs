use nalgebra::{Complex, DMatrix, SymmetricEigen};

use super::matrix::{adjoint, gram, matmul};
use super::{qconj, qmul, qnorm_sqr, qscale, qsub, AlgebraTag, DenseMatrix, HermitianPD, Quat};
use crate::{Error, Result};

/// A Hermitian matrix is treated as positive definite when its smallest
/// eigenvalue exceeds this fraction of its largest.
pub const PD_RELATIVE_TOL: f64 = 1e-12;

/// Singular values closer than this (relative) are flagged as ties.
pub const SINGULAR_TIE_TOL: f64 = 1e-12;

/// Relative tolerance when pairing the doubled eigenvalues of a quaternion
/// matrix's complex embedding.
const PAIR_TOL: f64 = 1e-8;

type C64 = Complex<f64>;

/// Lower Cholesky factor `L` with real positive diagonal and `L L* = H`.
pub fn cholesky(h: &HermitianPD) -> Result<DenseMatrix> {
    let m = h.dim();
    let max_diag = (0..m).map(|i| h.q(i, i)[0]).fold(f64::NEG_INFINITY, f64::max);
    if !(max_diag > 0.0) {
        return Err(Error::NotPositiveDefinite("non-positive diagonal".into()));
    }
    let tol = PD_RELATIVE_TOL * max_diag;
    let mut l = DenseMatrix::zeros(h.tag(), m, m)?;
    for j in 0..m {
        let mut d = h.q(j, j)[0];
        for k in 0..j {
            d -= qnorm_sqr(l.q(j, k));
        }
        if !(d > tol) {
            return Err(Error::NotPositiveDefinite(format!("pivot {j} is {d:e}")));
        }
        let ljj = d.sqrt();
        *l.q_mut(j, j) = [ljj, 0.0, 0.0, 0.0];
        for i in (j + 1)..m {
            let mut s = h.q(i, j);
            for k in 0..j {
                s = qsub(&s, &qmul(l.q(i, k), &qconj(l.q(j, k))));
            }
            *l.q_mut(i, j) = qscale(&s, 1.0 / ljj);
        }
    }
    Ok(l)
}

/// `L⁻¹ B` for lower-triangular `L` with real diagonal.
pub fn solve_lower(l: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if l.rows() != l.cols() || l.cols() != b.rows() || l.tag() != b.tag() {
        return Err(Error::Dimension("solve_lower shape mismatch".into()));
    }
    let m = l.rows();
    let mut x = b.clone();
    for c in 0..b.cols() {
        for i in 0..m {
            let mut s = *x.q(i, c);
            for k in 0..i {
                s = qsub(&s, &qmul(l.q(i, k), x.q(k, c)));
            }
            *x.q_mut(i, c) = qscale(&s, 1.0 / l.q(i, i)[0]);
        }
    }
    Ok(x)
}

/// `B (L*)⁻¹` for lower-triangular `L` with real diagonal.
pub fn solve_lower_adjoint_right(b: &DenseMatrix, l: &DenseMatrix) -> Result<DenseMatrix> {
    if l.rows() != l.cols() || l.rows() != b.cols() || l.tag() != b.tag() {
        return Err(Error::Dimension("solve_lower_adjoint_right shape mismatch".into()));
    }
    let n = l.rows();
    let mut x = b.clone();
    for r in 0..b.rows() {
        for j in 0..n {
            let mut s = *x.q(r, j);
            for k in 0..j {
                s = qsub(&s, &qmul(x.q(r, k), &qconj(l.q(j, k))));
            }
            *x.q_mut(r, j) = qscale(&s, 1.0 / l.q(j, j)[0]);
        }
    }
    Ok(x)
}

pub fn inverse_hpd(h: &HermitianPD) -> Result<HermitianPD> {
    let l = cholesky(h)?;
    let linv = solve_lower(&l, &DenseMatrix::identity(h.tag(), h.dim())?)?;
    Ok(HermitianPD::from_dense_lower(&matmul(&adjoint(&linv), &linv)?))
}

/// `log |H|` from the Cholesky factor.
pub fn logdet_hpd(h: &HermitianPD) -> Result<f64> {
    let l = cholesky(h)?;
    Ok(2.0 * (0..h.dim()).map(|i| l.q(i, i)[0].ln()).sum::<f64>())
}

/// `Some(log |H|)` when `H` is positive definite under [`PD_RELATIVE_TOL`],
/// `None` otherwise.
pub fn logdet_if_pd(h: &HermitianPD) -> Result<Option<f64>> {
    let eig = herm_eigenvalues(h)?;
    let max = eig[0];
    let min = eig[eig.len() - 1];
    if !(max > 0.0) || !(min > PD_RELATIVE_TOL * max) {
        return Ok(None);
    }
    Ok(Some(eig.iter().map(|v| v.ln()).sum()))
}

fn quat_to_pair(q: &Quat) -> (C64, C64) {
    (C64::new(q[0], q[1]), C64::new(q[2], q[3]))
}

/// Complex representation of a matrix. Reals and complexes map to
/// themselves; a quaternion entry `z₁ + z₂ j` becomes the 2×2 block
/// `[[z₁, z₂], [−z̄₂, z̄₁]]`, so an `m × n` quaternion matrix maps to a
/// `2m × 2n` complex matrix and the map is multiplicative.
pub fn complex_embed(a: &DenseMatrix) -> DMatrix<C64> {
    match a.tag() {
        AlgebraTag::Quaternion => {
            let mut out = DMatrix::<C64>::zeros(2 * a.rows(), 2 * a.cols());
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    let (z1, z2) = quat_to_pair(a.q(i, j));
                    out[(2 * i, 2 * j)] = z1;
                    out[(2 * i, 2 * j + 1)] = z2;
                    out[(2 * i + 1, 2 * j)] = -z2.conj();
                    out[(2 * i + 1, 2 * j + 1)] = z1.conj();
                }
            }
            out
        }
        _ => DMatrix::from_fn(a.rows(), a.cols(), |i, j| {
            let q = a.q(i, j);
            C64::new(q[0], q[1])
        }),
    }
}

fn sorted_desc(values: impl Iterator<Item = f64>) -> Vec<(usize, f64)> {
    let mut v: Vec<(usize, f64)> = values.enumerate().collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1));
    v
}

/// Collapses the doubled spectrum of a quaternion embedding into one value
/// per pair, returning the positions (in `sorted`) of the representatives.
fn deduplicate_pairs(sorted: &[(usize, f64)]) -> Result<Vec<(usize, f64)>> {
    let scale = sorted.iter().map(|p| p.1.abs()).fold(f64::MIN_POSITIVE, f64::max);
    sorted
        .chunks(2)
        .map(|pair| {
            let (a, b) = (pair[0].1, pair[1].1);
            if (a - b).abs() > PAIR_TOL * scale {
                return Err(Error::Consistency(format!(
                    "quaternion embedding eigenvalues do not pair up ({a} vs {b})"
                )));
            }
            Ok((pair[0].0, 0.5 * (a + b)))
        })
        .collect()
}

/// Real eigenvalues of a Hermitian matrix in descending order.
pub fn herm_eigenvalues(h: &HermitianPD) -> Result<Vec<f64>> {
    let m = h.dim();
    if m == 1 {
        return Ok(vec![h.q(0, 0)[0]]);
    }
    match h.tag() {
        AlgebraTag::Real => {
            let a = DMatrix::<f64>::from_fn(m, m, |i, j| h.q(i, j)[0]);
            Ok(sorted_desc(a.symmetric_eigenvalues().iter().copied()).into_iter().map(|p| p.1).collect())
        }
        AlgebraTag::Complex => {
            let a = complex_embed(&h.to_dense());
            Ok(sorted_desc(a.symmetric_eigenvalues().iter().copied()).into_iter().map(|p| p.1).collect())
        }
        AlgebraTag::Quaternion => {
            let a = complex_embed(&h.to_dense());
            let sorted = sorted_desc(a.symmetric_eigenvalues().iter().copied());
            Ok(deduplicate_pairs(&sorted)?.into_iter().map(|p| p.1).collect())
        }
        AlgebraTag::Octonion => unreachable!("Hermitian matrices are never octonionic"),
    }
}

/// Eigen-decomposition `H = E Λ E*` with eigenvalues descending and the
/// eigenvectors as the columns of the unitary `E`.
pub fn herm_eigen(h: &HermitianPD) -> Result<(Vec<f64>, DenseMatrix)> {
    let m = h.dim();
    let tag = h.tag();
    let mut vectors = DenseMatrix::zeros(tag, m, m)?;
    let values = match tag {
        AlgebraTag::Real => {
            let a = DMatrix::<f64>::from_fn(m, m, |i, j| h.q(i, j)[0]);
            let eig = SymmetricEigen::new(a);
            let sorted = sorted_desc(eig.eigenvalues.iter().copied());
            for (col, (src, _)) in sorted.iter().enumerate() {
                for i in 0..m {
                    *vectors.q_mut(i, col) = [eig.eigenvectors[(i, *src)], 0.0, 0.0, 0.0];
                }
            }
            sorted.into_iter().map(|p| p.1).collect()
        }
        AlgebraTag::Complex => {
            let eig = SymmetricEigen::new(complex_embed(&h.to_dense()));
            let sorted = sorted_desc(eig.eigenvalues.iter().copied());
            for (col, (src, _)) in sorted.iter().enumerate() {
                for i in 0..m {
                    let z = eig.eigenvectors[(i, *src)];
                    *vectors.q_mut(i, col) = [z.re, z.im, 0.0, 0.0];
                }
            }
            sorted.into_iter().map(|p| p.1).collect()
        }
        AlgebraTag::Quaternion => {
            let eig = SymmetricEigen::new(complex_embed(&h.to_dense()));
            let sorted = sorted_desc(eig.eigenvalues.iter().copied());
            let reps = deduplicate_pairs(&sorted)?;
            // A complex eigenvector u of the embedding is the first column of
            // the embedded quaternion vector x, i.e. u = (z₁, −z̄₂) per entry.
            for (col, (src, _)) in reps.iter().enumerate() {
                for i in 0..m {
                    let z1 = eig.eigenvectors[(2 * i, *src)];
                    let z2 = -eig.eigenvectors[(2 * i + 1, *src)].conj();
                    *vectors.q_mut(i, col) = [z1.re, z1.im, z2.re, z2.im];
                }
            }
            // Normalize to guard against the pair representative mixing in
            // rounding-level components.
            for col in 0..m {
                let norm: f64 = (0..m).map(|i| qnorm_sqr(vectors.q(i, col))).sum::<f64>().sqrt();
                for i in 0..m {
                    let v = qscale(vectors.q(i, col), 1.0 / norm);
                    *vectors.q_mut(i, col) = v;
                }
            }
            reps.into_iter().map(|p| p.1).collect()
        }
        AlgebraTag::Octonion => unreachable!("Hermitian matrices are never octonionic"),
    };
    Ok((values, vectors))
}

/// Singular value decomposition `X = left* · diag(singulars) · right_rows`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    /// `m × m` unitary.
    pub left: DenseMatrix,
    /// Strictly decreasing positive singular values (unless `has_ties`).
    pub singulars: Vec<f64>,
    /// `m × n` with orthonormal rows.
    pub right_rows: DenseMatrix,
    /// Set when two singular values agree to within [`SINGULAR_TIE_TOL`].
    pub has_ties: bool,
}

/// SVD of a full-rank `m × n` matrix with `m ≤ n`, computed from the
/// eigen-decomposition of `X X*`.
pub fn svd(x: &DenseMatrix) -> Result<SvdResult> {
    let (m, n) = (x.rows(), x.cols());
    if m > n {
        return Err(Error::Dimension(format!("svd needs rows <= cols, got {m}x{n}")));
    }
    let (values, e) = herm_eigen(&gram(x))?;
    let singulars: Vec<f64> = values.iter().map(|v| v.max(0.0).sqrt()).collect();
    let smax = singulars[0];
    let smin = singulars[m - 1];
    if !(smax > 0.0) || smin < 1e-12 * smax {
        return Err(Error::Degenerate(format!(
            "rank-deficient matrix (smallest singular value {smin:e}, largest {smax:e})"
        )));
    }
    let has_ties = singulars.windows(2).any(|w| w[0] - w[1] <= SINGULAR_TIE_TOL * w[0]);
    let left = adjoint(&e);
    let mut right_rows = matmul(&left, x)?;
    for (i, s) in singulars.iter().enumerate() {
        for j in 0..n {
            let v = qscale(right_rows.q(i, j), 1.0 / s);
            *right_rows.q_mut(i, j) = v;
        }
    }
    Ok(SvdResult { left, singulars, right_rows, has_ties })
}

/// `diag(d) · A` for real `d`.
pub(crate) fn scale_rows(a: &DenseMatrix, d: &[f64]) -> DenseMatrix {
    let mut out = a.clone();
    for (i, s) in d.iter().enumerate() {
        for j in 0..a.cols() {
            let v = qscale(out.q(i, j), *s);
            *out.q_mut(i, j) = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gram;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const ASSOC: [AlgebraTag; 3] = [AlgebraTag::Real, AlgebraTag::Complex, AlgebraTag::Quaternion];

    fn random_matrix(tag: AlgebraTag, m: usize, n: usize, rng: &mut impl Rng) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(tag, m, n).unwrap();
        for q in a.quats_mut() {
            for c in q.iter_mut().take(tag.beta()) {
                *c = rng.random_range(-1.0..1.0);
            }
        }
        a
    }

    fn herm(tag: AlgebraTag, m: usize, entries: &[&[f64]]) -> HermitianPD {
        HermitianPD::from_dense(&DenseMatrix::from_coeffs(tag, m, m, entries).unwrap()).unwrap()
    }

    #[test]
    fn cholesky_examples() {
        let i3 = HermitianPD::identity(AlgebraTag::Complex, 3).unwrap();
        assert_eq!(cholesky(&i3).unwrap(), DenseMatrix::identity(AlgebraTag::Complex, 3).unwrap());

        let h = herm(AlgebraTag::Real, 2, &[&[4.0], &[2.0], &[2.0], &[3.0]]);
        let l = cholesky(&h).unwrap();
        assert_eq!(l.get(0, 0).re(), 2.0);
        assert_eq!(l.get(1, 0).re(), 1.0);
        assert!((l.get(1, 1).re() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(l.get(0, 1).re(), 0.0);
        let back = matmul(&l, &adjoint(&l)).unwrap();
        assert!(back.max_abs_diff(&h.to_dense()).unwrap() < 1e-14);

        let nine = HermitianPD::diagonal(AlgebraTag::Quaternion, &[9.0]).unwrap();
        assert_eq!(cholesky(&nine).unwrap().get(0, 0).coeffs(), &[3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let h = herm(AlgebraTag::Real, 2, &[&[1.0], &[2.0], &[2.0], &[1.0]]);
        assert!(matches!(cholesky(&h), Err(Error::NotPositiveDefinite(_))));
        let z = HermitianPD::diagonal(AlgebraTag::Real, &[1.0, 0.0]).unwrap();
        assert!(matches!(cholesky(&z), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn eigenvalue_examples() {
        let d = HermitianPD::diagonal(AlgebraTag::Real, &[1.0, 3.0]).unwrap();
        assert_eq!(herm_eigenvalues(&d).unwrap(), vec![3.0, 1.0]);

        let c = herm(AlgebraTag::Complex, 2, &[&[2.0, 0.0], &[0.0, 1.0], &[0.0, -1.0], &[2.0, 0.0]]);
        let ev = herm_eigenvalues(&c).unwrap();
        assert!((ev[0] - 3.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);

        let q = AlgebraTag::Quaternion;
        let h = herm(q, 2, &[&[2.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0], &[0.0, 0.0, -1.0, 0.0], &[2.0, 0.0, 0.0, 0.0]]);
        let ev = herm_eigenvalues(&h).unwrap();
        assert_eq!(ev.len(), 2);
        assert!((ev[0] - 3.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        let full = complex_embed(&h.to_dense()).symmetric_eigenvalues();
        let mut full: Vec<f64> = full.iter().copied().collect();
        full.sort_by(|a, b| b.total_cmp(a));
        for (got, want) in full.iter().zip([3.0, 3.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn logdet_examples() {
        assert_eq!(logdet_hpd(&HermitianPD::identity(AlgebraTag::Quaternion, 3).unwrap()).unwrap(), 0.0);
        let c = herm(AlgebraTag::Complex, 2, &[&[2.0, 0.0], &[0.0, 1.0], &[0.0, -1.0], &[2.0, 0.0]]);
        assert!((logdet_hpd(&c).unwrap() - 3f64.ln()).abs() < 1e-14);
        let r = herm(AlgebraTag::Real, 2, &[&[4.0], &[2.0], &[2.0], &[3.0]]);
        assert!((logdet_hpd(&r).unwrap() - 8f64.ln()).abs() < 1e-14);
        assert!((logdet_if_pd(&r).unwrap().unwrap() - 8f64.ln()).abs() < 1e-13);
        let bad = herm(AlgebraTag::Real, 2, &[&[1.0], &[2.0], &[2.0], &[1.0]]);
        assert!(logdet_if_pd(&bad).unwrap().is_none());
        assert!(logdet_hpd(&bad).is_err());
    }

    #[test]
    fn embedding_examples() {
        let q = AlgebraTag::Quaternion;
        let one = DenseMatrix::identity(q, 1).unwrap();
        assert_eq!(complex_embed(&one), DMatrix::<C64>::identity(2, 2));
        let j = DenseMatrix::from_coeffs(q, 1, 1, &[&[0.0, 0.0, 1.0, 0.0]]).unwrap();
        let e = complex_embed(&j);
        assert_eq!(e[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(e[(1, 0)], C64::new(-1.0, 0.0));
        assert_eq!(e[(0, 0)], C64::new(0.0, 0.0));

        let z = DenseMatrix::from_coeffs(AlgebraTag::Complex, 1, 2, &[&[1.0, 2.0], &[3.0, -4.0]]).unwrap();
        let ez = complex_embed(&z);
        assert_eq!(ez.shape(), (1, 2));
        assert_eq!(ez[(0, 1)], C64::new(3.0, -4.0));
    }

    #[test]
    fn embedding_is_multiplicative_on_basis() {
        let q = AlgebraTag::Quaternion;
        for a in 0..4 {
            for b in 0..4 {
                let mut ca = [0.0; 4];
                let mut cb = [0.0; 4];
                ca[a] = 1.0;
                cb[b] = 1.0;
                let x = DenseMatrix::from_coeffs(q, 1, 1, &[&ca]).unwrap();
                let y = DenseMatrix::from_coeffs(q, 1, 1, &[&cb]).unwrap();
                let lhs = complex_embed(&matmul(&x, &y).unwrap());
                let rhs = complex_embed(&x) * complex_embed(&y);
                assert!((lhs - rhs).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn embedding_homomorphism_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_matrix(AlgebraTag::Quaternion, 3, 2, &mut rng);
            let b = random_matrix(AlgebraTag::Quaternion, 2, 4, &mut rng);
            let lhs = complex_embed(&matmul(&a, &b).unwrap());
            let rhs = complex_embed(&a) * complex_embed(&b);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn embedding_trace_and_logdet() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let a = random_matrix(AlgebraTag::Quaternion, 3, 5, &mut rng);
            let h = gram(&a);
            let e = complex_embed(&h.to_dense());
            assert!((e.trace().re - 2.0 * h.trace()).abs() < 1e-9);
            let ld_embed = e.determinant().re.ln();
            assert!((ld_embed - 2.0 * logdet_hpd(&h).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn cholesky_logdet_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for tag in ASSOC {
            for _ in 0..100 {
                let a = random_matrix(tag, 3, 4, &mut rng);
                let h = gram(&a);
                let l = cholesky(&h).unwrap();
                let via_diag: f64 = 2.0 * (0..3).map(|i| l.get(i, i).re().ln()).sum::<f64>();
                let via_eig: f64 = herm_eigenvalues(&h).unwrap().iter().map(|v| v.ln()).sum();
                assert!((via_diag - via_eig).abs() < 1e-9, "{tag}");
                let back = matmul(&l, &adjoint(&l)).unwrap();
                assert!(back.max_abs_diff(&h.to_dense()).unwrap() < 1e-10 * h.trace());
            }
        }
    }

    #[test]
    fn solves_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for tag in ASSOC {
            let a = random_matrix(tag, 3, 5, &mut rng);
            let h = gram(&a);
            let l = cholesky(&h).unwrap();
            let b = random_matrix(tag, 3, 2, &mut rng);
            let x = solve_lower(&l, &b).unwrap();
            assert!(matmul(&l, &x).unwrap().max_abs_diff(&b).unwrap() < 1e-12);
            let c = random_matrix(tag, 2, 3, &mut rng);
            let y = solve_lower_adjoint_right(&c, &l).unwrap();
            assert!(matmul(&y, &adjoint(&l)).unwrap().max_abs_diff(&c).unwrap() < 1e-12);
            let hinv = inverse_hpd(&h).unwrap();
            let id = matmul(&h.to_dense(), &hinv.to_dense()).unwrap();
            assert!(id.max_abs_diff(&DenseMatrix::identity(tag, 3).unwrap()).unwrap() < 1e-10);
        }
    }

    #[test]
    fn eigenvectors_diagonalize() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for tag in ASSOC {
            for _ in 0..20 {
                let h = gram(&random_matrix(tag, 3, 4, &mut rng));
                let (vals, e) = herm_eigen(&h).unwrap();
                let ehe = matmul(&matmul(&adjoint(&e), &h.to_dense()).unwrap(), &e).unwrap();
                let want = HermitianPD::diagonal(tag, &vals).unwrap().to_dense();
                assert!(ehe.max_abs_diff(&want).unwrap() < 1e-10, "{tag}");
            }
        }
    }

    #[test]
    fn svd_examples() {
        let x = DenseMatrix::from_real(AlgebraTag::Real, 2, 2, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        let s = svd(&x).unwrap();
        assert!((s.singulars[0] - 2.0).abs() < 1e-14 && (s.singulars[1] - 1.0).abs() < 1e-14);
        assert!(!s.has_ties);

        let z = DenseMatrix::from_coeffs(AlgebraTag::Complex, 1, 1, &[&[0.0, 2.0]]).unwrap();
        assert!((svd(&z).unwrap().singulars[0] - 2.0).abs() < 1e-14);

        let tie = DenseMatrix::identity(AlgebraTag::Real, 2).unwrap();
        assert!(svd(&tie).unwrap().has_ties);

        let rank1 = DenseMatrix::from_real(AlgebraTag::Real, 2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(svd(&rank1), Err(Error::Degenerate(_))));
    }

    #[test]
    fn svd_reconstructs_and_matches_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for tag in ASSOC {
            for _ in 0..50 {
                let x = random_matrix(tag, 2, 3, &mut rng);
                let s = svd(&x).unwrap();
                let d = crate::algebra::linalg::scale_rows(&s.right_rows, &s.singulars);
                let back = matmul(&adjoint(&s.left), &d).unwrap();
                assert!(back.max_abs_diff(&x).unwrap() <= 1e-10 * x.frobenius_norm(), "{tag}");
                let ww = gram(&s.right_rows).to_dense();
                assert!(ww.max_abs_diff(&DenseMatrix::identity(tag, 2).unwrap()).unwrap() < 1e-9);
                let ev = herm_eigenvalues(&gram(&x)).unwrap();
                for (sv, e) in s.singulars.iter().zip(ev) {
                    assert!((sv * sv - e).abs() < 1e-9);
                }
                assert!(s.singulars[0] > s.singulars[1]);
            }
        }
    }

    #[test]
    fn octonion_matrices_unsupported() {
        assert!(matches!(HermitianPD::identity(AlgebraTag::Octonion, 2), Err(Error::Unsupported(_))));
    }
}
