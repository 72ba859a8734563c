//! Spectral kernels built on [`hermitian_eig`].

use super::eig::{hermitian_eig, hermitian_eigenvalues, HermEig};
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::tol::{default_rank_cutoff, HERM_TOL};

/// Eigendecomposition of a PSD matrix; fails if an eigenvalue is more
/// negative than `-HERM_TOL · λ_max`.
pub fn psd_eig(a: &ComplexMatrix) -> Result<HermEig> {
    let e = hermitian_eig(a)?;
    let floor = -HERM_TOL * e.lambda_max().abs().max(f64::MIN_POSITIVE);
    if e.lambda_min() < floor {
        return Err(Error::NotPsd { eigenvalue: e.lambda_min() });
    }
    Ok(e)
}

/// Default absolute rank cutoff `n · ε · λ_max` for the given decomposition.
pub fn default_cutoff(e: &HermEig) -> f64 {
    default_rank_cutoff(e.order(), e.lambda_max())
}

/// Moore–Penrose inverse of a PSD matrix by spectral truncation at
/// `rank_tol` (absolute).
pub fn pinv_psd(a: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let e = psd_eig(a)?;
    Ok(e.reconstruct_with(|l| if l > rank_tol { 1.0 / l } else { 0.0 }))
}

/// Hermitian PSD square root. Eigenvalues within the PSD tolerance below
/// zero are clamped.
pub fn sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = psd_eig(a)?;
    Ok(e.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// Number of eigenvalues strictly above `rank_tol`.
pub fn numerical_rank(a: &ComplexMatrix, rank_tol: f64) -> Result<usize> {
    let e = psd_eig(a)?;
    Ok(e.eigenvalues.iter().filter(|&&l| l > rank_tol).count())
}

/// Rank with the default cutoff.
pub fn numerical_rank_default(a: &ComplexMatrix) -> Result<usize> {
    let e = psd_eig(a)?;
    let tau = default_cutoff(&e);
    Ok(e.eigenvalues.iter().filter(|&&l| l > tau).count())
}

/// Largest singular value, `sqrt(λ_max(M*M))`.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    // Form the smaller Gram matrix.
    let gram = if m.rows() < m.cols() { m.matmul(&m.adjoint()) } else { m.adjoint().matmul(m) };
    let ev = hermitian_eigenvalues(&gram.hermitian_part())?;
    Ok(ev[0].max(0.0).sqrt())
}

/// Smallest singular value of a square matrix.
///
/// Read off the Hermitian dilation `[[0, M], [M*, 0]]`, whose eigenvalues
/// are `±σ_i`; this keeps absolute accuracy `O(ε‖M‖)` for tiny `σ_min`,
/// which the Gram matrix `M*M` would square away.
pub fn min_singular_value(m: &ComplexMatrix) -> Result<f64> {
    let n = m.ensure_square()?;
    if n == 0 {
        return Ok(0.0);
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let dilation = ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, false) => m[(i, j - n)],
        (false, true) => m[(j, i - n)].conj(),
        _ => C64::new(0.0, 0.0),
    });
    let ev = hermitian_eigenvalues(&dilation)?;
    // Eigenvalues come in ± pairs; the n-th largest is σ_min up to rounding.
    Ok(ev[n - 1].abs().min(ev[n].abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.distance(b) <= tol * b.frobenius_norm().max(1.0)
    }

    #[test]
    fn pinv_diagonal_and_identity() {
        let p = pinv_psd(&ComplexMatrix::from_real_diag(&[4.0, 0.0]), 1e-12).unwrap();
        assert!(close(&p, &ComplexMatrix::from_real_diag(&[0.25, 0.0]), 1e-15));
        let i3 = ComplexMatrix::identity(3);
        assert!(close(&pinv_psd(&i3, 1e-12).unwrap(), &i3, 1e-15));
    }

    #[test]
    fn pinv_rank_one_satisfies_penrose_identities() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let p = pinv_psd(&a, 1e-12).unwrap();
        assert!(close(&p, &ComplexMatrix::from_real_rows(&[&[0.25, 0.25], &[0.25, 0.25]]), 1e-14));
        assert!(close(&(&(&a * &p) * &a), &a, 1e-14));
        assert!(close(&(&(&p * &a) * &p), &p, 1e-14));
        assert!(close(&(&a * &p).adjoint(), &(&a * &p), 1e-14));
        assert!(close(&(&p * &a).adjoint(), &(&p * &a), 1e-14));
    }

    #[test]
    fn sqrt_examples() {
        let s = sqrt_psd(&ComplexMatrix::from_real_diag(&[4.0, 1.0])).unwrap();
        assert!(close(&s, &ComplexMatrix::from_real_diag(&[2.0, 1.0]), 1e-15));
        let a = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let s = sqrt_psd(&a).unwrap();
        let r3 = 3f64.sqrt();
        let want = ComplexMatrix::from_real_rows(&[
            &[0.5 * (r3 + 1.0), 0.5 * (r3 - 1.0)],
            &[0.5 * (r3 - 1.0), 0.5 * (r3 + 1.0)],
        ]);
        assert!(close(&s, &want, 1e-14));
        assert!(close(&(&s * &s), &a, 1e-14));
    }

    #[test]
    fn spectral_norm_examples() {
        let j2 = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!((spectral_norm(&j2).unwrap() - 2.0).abs() < 1e-14);
        assert!((spectral_norm(&ComplexMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-14);
        assert!((spectral_norm(&ComplexMatrix::from_real_diag(&[1.0, -3.0])).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(min_singular_value(&j2).unwrap(), 0.0);
        let d = ComplexMatrix::from_real_diag(&[3.0, -0.5, 2.0]);
        assert!((min_singular_value(&d).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rank_examples() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 1e-20]);
        assert_eq!(numerical_rank_default(&a).unwrap(), 1);
        assert_eq!(numerical_rank_default(&ComplexMatrix::identity(4)).unwrap(), 4);
        let r1 = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(numerical_rank_default(&r1).unwrap(), 1);
    }

    #[test]
    fn not_psd_is_rejected() {
        let a = ComplexMatrix::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(pinv_psd(&a, 1e-12), Err(Error::NotPsd { .. })));
        assert!(matches!(sqrt_psd(&a), Err(Error::NotPsd { .. })));
        assert!(matches!(numerical_rank(&a, 1e-12), Err(Error::NotPsd { .. })));
    }
}
