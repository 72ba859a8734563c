//! Hermitian eigendecomposition by cyclic Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot entry with a diagonal
//! unitary and then applies a real Jacobi rotation, so the iteration is the
//! real symmetric algorithm in disguise. Convergence is quadratic and the
//! residual is at the level of a few ulps of `‖H‖_F` for the sizes this
//! crate targets (n ≤ 64).

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::tol::HERM_TOL;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted descending with matching unitary eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermEig {
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `U f(Λ) U*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let d: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        u.scale_cols(&d).matmul(&u.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<usize> {
    let n = h.ensure_square()?;
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let residual = h.hermitian_residual();
    if residual > HERM_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(n)
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(H + H*)/2` after the Hermitian check.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermEig> {
    let n = check_hermitian(h)?;
    let mut a: Vec<C64> = h.hermitian_part().as_slice().to_vec();
    let mut v = ComplexMatrix::identity(n).as_slice().to_vec();
    jacobi(n, &mut a, Some(&mut v))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].re.total_cmp(&a[i * n + i].re));
    let eigenvalues = order.iter().map(|&k| a[k * n + k].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
    Ok(HermEig { eigenvalues, eigenvectors })
}

/// Eigenvalues only, sorted descending (Householder tridiagonalization and
/// implicit QL).
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = check_hermitian(h)?;
    let mut a: Vec<C64> = h.hermitian_part().as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n > 0 {
        tridiagonalize(n, &mut a, &mut d, &mut e);
        tridiagonal_ql(&mut d, &mut e)?;
    }
    d.sort_by(|x, y| y.total_cmp(x));
    Ok(d)
}

/// `(λ_min, λ_max)` of a Hermitian matrix given as a dense row-major buffer.
///
/// No Hermitian check; callers build the buffer from `(B + B*)/2`-type
/// expressions. The buffer is consumed as scratch space.
pub(crate) fn extreme_eigenvalues_unchecked(n: usize, a: &mut [C64]) -> Result<(f64, f64)> {
    match n {
        0 => Ok((0.0, 0.0)),
        1 => Ok((a[0].re, a[0].re)),
        2 => {
            let (p, q, b) = (a[0].re, a[3].re, a[1]);
            let mid = 0.5 * (p + q);
            let rad = (0.5 * (p - q)).hypot(b.norm());
            Ok((mid - rad, mid + rad))
        }
        _ => {
            let mut d = vec![0.0; n];
            let mut e = vec![0.0; n];
            tridiagonalize(n, a, &mut d, &mut e);
            tridiagonal_ql(&mut d, &mut e)?;
            let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok((lo, hi))
        }
    }
}

/// Householder reduction of a Hermitian buffer to a real symmetric
/// tridiagonal matrix with the same eigenvalues: diagonal `d`, couplings
/// `e[k]` between rows `k` and `k + 1` (`e[n-1] = 0`). Destroys `a`.
fn tridiagonalize(n: usize, a: &mut [C64], d: &mut [f64], e: &mut [f64]) {
    let mut u = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let m = k + 1;
        let xnorm = (m..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        let x0 = a[m * n + k];
        if xnorm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        // u = (x − αe₁) scaled so that u*u = 2.
        for i in m..n {
            u[i] = a[i * n + k];
        }
        u[m] -= alpha;
        let unorm = (m..n).map(|i| u[i].norm_sqr()).sum::<f64>().sqrt();
        let scale = std::f64::consts::SQRT_2 / unorm;
        for ui in u.iter_mut().take(n).skip(m) {
            *ui *= scale;
        }
        // p = A₂₂ u, then q = p − (u*p/2) u, A₂₂ ← A₂₂ − u q* − q u*.
        for i in m..n {
            p[i] = (m..n).map(|j| a[i * n + j] * u[j]).sum();
        }
        let k_half: C64 = (m..n).map(|i| u[i].conj() * p[i]).sum::<C64>() * 0.5;
        for i in m..n {
            p[i] -= k_half * u[i];
        }
        for i in m..n {
            for j in m..n {
                a[i * n + j] -= u[i] * p[j].conj() + p[i] * u[j].conj();
            }
        }
        e[k] = alpha.norm();
    }
    for i in 0..n {
        d[i] = a[i * n + i].re;
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1) * n + (n - 2)].norm();
    }
    e[n - 1] = 0.0;
}

/// Implicit QL iteration on a symmetric tridiagonal matrix; eigenvalues are
/// left in `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iters = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iters += 1;
            if iters > 60 {
                return Err(Error::ConvergenceFailure { sweeps: iters });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                let r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn off_diagonal_norm(n: usize, a: &[C64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += a[i * n + j].norm_sqr();
        }
    }
    (2.0 * s).sqrt()
}

/// In-place cyclic Jacobi on the Hermitian buffer `a` (row-major, n×n).
/// Accumulates rotations into `v` when given.
fn jacobi(n: usize, a: &mut [C64], mut v: Option<&mut Vec<C64>>) -> Result<()> {
    if n < 2 {
        if n == 1 {
            a[0] = C64::new(a[0].re, 0.0);
        }
        return Ok(());
    }
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok(());
    }
    let target = f64::EPSILON * 0.25 * scale;

    for sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(n, a) <= target {
            for k in 0..n {
                a[k * n + k].im = 0.0;
            }
            return Ok(());
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // After a few sweeps, drop rotations that cannot change the
                // diagonal in floating point.
                if sweep > 3 && app.abs() + 100.0 * b == app.abs() && aqq.abs() + 100.0 * b == aqq.abs() {
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    continue;
                }
                // Phase e^{-iφ} turns the pivot into the real number b.
                let phase = apq.conj() / b;
                let theta = (aqq - app) / (2.0 * b);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;

                // Column transform by G = diag(1, phase) · [[c, s], [-s, c]].
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = phase * (-s);
                let g_qq = phase * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * g_pp + akq * g_qp;
                    a[k * n + q] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[q * n + k] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = C64::new(app - t * b, 0.0);
                a[q * n + q] = C64::new(aqq + t * b, 0.0);

                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * g_pp + vkq * g_qp;
                        v[k * n + q] = vkp * g_pq + vkq * g_qq;
                    }
                }
            }
        }
    }
    if off_diagonal_norm(n, a) <= target * 16.0 {
        return Ok(());
    }
    Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS })
}

/// Top eigenvector of a Hermitian matrix.
pub fn top_eigenvector(h: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let e = hermitian_eig(h)?;
    Ok((e.lambda_max(), e.eigenvectors.column(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::I;

    fn assert_decomposes(h: &ComplexMatrix) -> HermEig {
        let e = hermitian_eig(h).unwrap();
        let n = h.rows();
        let scale = h.frobenius_norm().max(1.0);
        assert!(e.reconstruct().distance(h) <= 1e-10 * scale, "reconstruction");
        let u = &e.eigenvectors;
        assert!((u.adjoint() * u).distance(&ComplexMatrix::identity(n)) <= 1e-10, "unitarity");
        assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]), "descending");
        e
    }

    #[test]
    fn diagonal_input() {
        let e = assert_decomposes(&ComplexMatrix::from_real_diag(&[2.0, 1.0]));
        assert_eq!(e.eigenvalues, vec![2.0, 1.0]);
        assert!((e.eigenvectors[(0, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.eigenvectors[(1, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_two_by_two() {
        let e = assert_decomposes(&ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]));
        assert!((e.eigenvalues[0] - 3.0).abs() < 1e-14 && (e.eigenvalues[1] - 1.0).abs() < 1e-14);
        let e = assert_decomposes(&ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14 && (e.eigenvalues[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_pivot() {
        // [[1, i], [-i, 1]] has eigenvalues 2 and 0.
        let h = ComplexMatrix::from_rows(&[&[ONE, I], &[-I, ONE]]);
        let e = assert_decomposes(&h);
        assert!((e.eigenvalues[0] - 2.0).abs() < 1e-14 && e.eigenvalues[1].abs() < 1e-14);
    }

    #[test]
    fn three_by_three_with_repeated_eigenvalue() {
        let h = ComplexMatrix::from_rows(&[
            &[C64::new(2.0, 0.0), C64::new(0.0, 1.0), ZERO],
            &[C64::new(0.0, -1.0), C64::new(2.0, 0.0), ZERO],
            &[ZERO, ZERO, C64::new(3.0, 0.0)],
        ]);
        let e = assert_decomposes(&h);
        for (got, want) in e.eigenvalues.iter().zip([3.0, 3.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn tridiagonal_path_matches_jacobi() {
        let mut seed = 0x9e37_79b9_7f4a_7c15_u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in 1..=9 {
            for _ in 0..20 {
                let m = ComplexMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
                let h = m.hermitian_part();
                let full = hermitian_eig(&h).unwrap().eigenvalues;
                let fast = hermitian_eigenvalues(&h).unwrap();
                for (a, b) in full.iter().zip(&fast) {
                    assert!((a - b).abs() < 1e-13, "n={n}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&r), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn extreme_eigenvalue_paths_agree() {
        let h = ComplexMatrix::from_rows(&[
            &[C64::new(1.0, 0.0), C64::new(0.3, 0.4), C64::new(-1.0, 0.2)],
            &[C64::new(0.3, -0.4), C64::new(-2.0, 0.0), C64::new(0.0, 0.7)],
            &[C64::new(-1.0, -0.2), C64::new(0.0, -0.7), C64::new(0.5, 0.0)],
        ]);
        let ev = hermitian_eigenvalues(&h).unwrap();
        let mut buf = h.as_slice().to_vec();
        let (lo, hi) = extreme_eigenvalues_unchecked(3, &mut buf).unwrap();
        assert!((hi - ev[0]).abs() < 1e-14 && (lo - ev[2]).abs() < 1e-14);

        let h2 = ComplexMatrix::from_rows(&[
            &[C64::new(1.0, 0.0), C64::new(0.3, 0.4)],
            &[C64::new(0.3, -0.4), C64::new(-2.0, 0.0)],
        ]);
        let ev = hermitian_eigenvalues(&h2).unwrap();
        let mut buf = h2.as_slice().to_vec();
        let (lo, hi) = extreme_eigenvalues_unchecked(2, &mut buf).unwrap();
        assert!((hi - ev[0]).abs() < 1e-14 && (lo - ev[1]).abs() < 1e-14);
    }
}
