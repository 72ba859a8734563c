//! Operators on the semi-Hilbertian space `(Cⁿ, ⟨·,·⟩_A)`.
//!
//! A non-zero PSD matrix `A` induces the semi-inner product
//! `⟨x, y⟩_A = ⟨Ax, y⟩` (linear in `x`, conjugate-linear in `y`). The
//! context precomputes the spectral data of `A` that every other operation
//! reuses.
//!
//! Two finite-dimensional simplifications are used throughout:
//!
//! * `R(A^{1/2}) = R(A)`, so the class of A-bounded operators coincides with
//!   `B_A`, the operators with `T*(R(A)) ⊆ R(A)`. A single membership
//!   predicate covers both.
//! * The operator `T̃` induced on `R(A^{1/2})` is represented in the
//!   orthonormal eigenbasis `U₊` of `A` (eigenvalues descending) as the r×r
//!   matrix `Λ₊^{1/2} (U₊* T U₊) Λ₊^{−1/2}`. Then `‖T‖_A = ‖T̃‖`,
//!   `w_A(T) = w(T̃)`, `c_A(T) = c(T̃)`, and `T ↦ T̃` is a unital
//!   *-homomorphism on `B_A` with `(T♯)~ = (T̃)*`. Another orthonormal
//!   eigenbasis changes `T̃` only by a unitary similarity.
//!
//! `m_A(T) = inf{‖Tx‖_A : ‖x‖_A = 1}` is `σ_min(T̃)`: components of `x` in
//! `N(A)` carry no A-seminorm and are mapped by `T ∈ B_A` into vectors of
//! zero A-seminorm, so the infimum lives on `R(A)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, inner, min_singular_value, psd_eig, spectral_norm, vec_norm, ComplexMatrix, C64, I,
};
use crate::numrange::{radius_and_crawford, SweepOptions};
use crate::tol::{default_rank_cutoff, Tolerances, BORDERLINE_FACTOR};

/// Spectral data of a non-zero PSD matrix `A`. Immutable once built.
#[derive(Debug, Clone)]
pub struct SemiHilbertContext {
    a: ComplexMatrix,
    n: usize,
    rank: usize,
    u_plus: ComplexMatrix,
    lambda_plus: Vec<f64>,
    null_basis: ComplexMatrix,
    a_half: ComplexMatrix,
    a_pinv: ComplexMatrix,
    a_half_pinv: ComplexMatrix,
    projector: ComplexMatrix,
    sqrt_lambda: Vec<f64>,
    inv_sqrt_lambda: Vec<f64>,
    tol: Tolerances,
}

/// Outcome of the range-inclusion test `T*(R(A)) ⊆ R(A)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    /// `‖(I − P)T*A‖_F / max(1, ‖T*A‖_F)`.
    pub residual: f64,
    /// Residual within a factor of ten of the threshold.
    pub borderline: bool,
}

/// The four A-quantities of an operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AQuantities {
    pub seminorm: f64,
    pub w: f64,
    pub c: f64,
    pub m: f64,
}

impl SemiHilbertContext {
    /// Builds the context, with an optional absolute rank cutoff replacing
    /// the default `n·ε·λ_max`.
    pub fn new(a: &ComplexMatrix, rank_tol_override: Option<f64>) -> Result<Self> {
        let n = a.ensure_square()?;
        if !a.is_finite() {
            return Err(Error::NonFinite);
        }
        let eig = psd_eig(a)?;
        let cutoff = rank_tol_override.unwrap_or_else(|| default_rank_cutoff(n, eig.lambda_max()));
        let rank = eig.eigenvalues.iter().filter(|&&l| l > cutoff).count();
        if rank == 0 {
            return Err(Error::ZeroOperator);
        }
        let lambda_plus: Vec<f64> = eig.eigenvalues[..rank].to_vec();
        let u_plus = eig.eigenvectors.leading_columns(rank);
        let null_basis = eig.eigenvectors.trailing_columns(rank);
        let sqrt_lambda: Vec<f64> = lambda_plus.iter().map(|l| l.sqrt()).collect();
        let inv_sqrt_lambda: Vec<f64> = sqrt_lambda.iter().map(|s| 1.0 / s).collect();
        let inv_lambda: Vec<f64> = lambda_plus.iter().map(|l| 1.0 / l).collect();
        let u_star = u_plus.adjoint();
        let spectral = |d: &[f64]| u_plus.scale_cols(d).matmul(&u_star);
        // A^{1/2} keeps the sub-cutoff eigenvalues (clamped at 0) so that
        // A^{1/2}·A^{1/2} reproduces A itself.
        let a_half = eig.reconstruct_with(|l| l.max(0.0).sqrt());
        Ok(Self {
            a: a.hermitian_part(),
            n,
            rank,
            a_pinv: spectral(&inv_lambda),
            a_half_pinv: spectral(&inv_sqrt_lambda),
            projector: spectral(&vec![1.0; rank]),
            a_half,
            u_plus,
            lambda_plus,
            null_basis,
            sqrt_lambda,
            inv_sqrt_lambda,
            tol: Tolerances::with_rank(cutoff),
        })
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Orthonormal basis of `R(A)` (n×r), eigenvalues descending.
    pub fn range_basis(&self) -> &ComplexMatrix {
        &self.u_plus
    }

    /// Orthonormal basis of `N(A)` (n×(n−r)).
    pub fn null_basis(&self) -> &ComplexMatrix {
        &self.null_basis
    }

    pub fn positive_eigenvalues(&self) -> &[f64] {
        &self.lambda_plus
    }

    pub fn a_half(&self) -> &ComplexMatrix {
        &self.a_half
    }

    pub fn a_pinv(&self) -> &ComplexMatrix {
        &self.a_pinv
    }

    pub fn a_half_pinv(&self) -> &ComplexMatrix {
        &self.a_half_pinv
    }

    /// Orthogonal projector onto `R(A)`.
    pub fn projector(&self) -> &ComplexMatrix {
        &self.projector
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn check_vector(&self, x: &[C64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        Ok(())
    }

    /// `⟨x, y⟩_A = ⟨Ax, y⟩`, linear in `x` and conjugate-linear in `y`.
    pub fn a_inner(&self, x: &[C64], y: &[C64]) -> Result<C64> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        Ok(inner(&self.a.matvec(x), y))
    }

    /// `‖x‖_A`, evaluated as the Euclidean norm of `Λ₊^{1/2} U₊* x`.
    pub fn a_seminorm_vec(&self, x: &[C64]) -> Result<f64> {
        Ok(vec_norm(&self.reduced_coordinates(x)?))
    }

    /// `Λ₊^{1/2} U₊* x`: coordinates of `Ax` in the reduction space.
    pub fn reduced_coordinates(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.check_vector(x)?;
        let c = self.u_plus.adjoint().matvec(x);
        Ok(c.iter().zip(&self.sqrt_lambda).map(|(z, s)| z * s).collect())
    }

    /// Range-inclusion test for `B_A`.
    pub fn membership(&self, t: &ComplexMatrix) -> Result<Membership> {
        t.ensure_order(self.n)?;
        let ts_a = t.adjoint().matmul(&self.a);
        let outside = &ts_a - &self.projector.matmul(&ts_a);
        let residual = outside.frobenius_norm() / ts_a.frobenius_norm().max(1.0);
        let threshold = self.tol.membership;
        Ok(Membership {
            member: residual <= threshold,
            residual,
            borderline: residual <= threshold && residual * BORDERLINE_FACTOR > threshold,
        })
    }

    pub fn in_ba(&self, t: &ComplexMatrix) -> bool {
        self.membership(t).map(|m| m.member).unwrap_or(false)
    }

    fn require_member(&self, t: &ComplexMatrix) -> Result<()> {
        let m = self.membership(t)?;
        if !m.member {
            return Err(Error::NotInBA { residual: m.residual });
        }
        Ok(())
    }

    /// The distinguished A-adjoint `T♯ = A† T* A`.
    pub fn sharp(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.require_member(t)?;
        Ok(self.sharp_unchecked(t))
    }

    pub(crate) fn sharp_unchecked(&self, t: &ComplexMatrix) -> ComplexMatrix {
        // `A†T*A = U₊Λ⁻¹(U₊*T*U₊)ΛU₊*`, which keeps the range inside `R(A)`.
        let inv_lambda: Vec<f64> = self.lambda_plus.iter().map(|l| 1.0 / l).collect();
        let core = self.u_plus.adjoint().matmul(&t.adjoint()).matmul(&self.u_plus);
        self.u_plus.matmul(&core.scale_rows(&inv_lambda).scale_cols(&self.lambda_plus)).matmul(&self.u_plus.adjoint())
    }

    /// r×r matrix of the induced operator `T̃`.
    pub fn tilde(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.require_member(t)?;
        Ok(self.tilde_unchecked(t))
    }

    pub(crate) fn tilde_unchecked(&self, t: &ComplexMatrix) -> ComplexMatrix {
        let compressed = self.u_plus.adjoint().matmul(t).matmul(&self.u_plus);
        compressed.scale_rows(&self.sqrt_lambda).scale_cols(&self.inv_sqrt_lambda)
    }

    /// n×n operator `U₊ M U₊*` acting on `R(A)`; satisfies
    /// `A^{1/2} T = lift(T̃) A^{1/2}` for `T ∈ B_A`.
    pub fn lift(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        m.ensure_order(self.rank)?;
        Ok(self.u_plus.matmul(m).matmul(&self.u_plus.adjoint()))
    }

    /// `(‖T‖_A, w_A(T), c_A(T), m_A(T))` via `T̃`.
    pub fn a_quantities(&self, t: &ComplexMatrix, opts: &SweepOptions) -> Result<AQuantities> {
        let reduced = self.tilde(t)?;
        reduced_quantities(&reduced, opts)
    }

    /// `Re_A(T) = (T + T♯)/2` and `Im_A(T) = (T − T♯)/(2i)`.
    pub fn cartesian_parts(&self, t: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let s = self.sharp(t)?;
        let re = (t + &s).scale_real(0.5);
        let im = (t - &s).scale(-0.5 * I);
        Ok((re, im))
    }

    /// `‖AT − T*A‖_F / max(1, ‖AT‖_F)`.
    pub fn selfadjoint_residual(&self, t: &ComplexMatrix) -> Result<f64> {
        t.ensure_order(self.n)?;
        let at = self.a.matmul(t);
        let diff = &at - &at.adjoint();
        Ok(diff.frobenius_norm() / at.frobenius_norm().max(1.0))
    }

    /// `AT = T*A`, to the reconstruction tolerance.
    pub fn is_a_selfadjoint(&self, t: &ComplexMatrix) -> bool {
        self.selfadjoint_residual(t).map(|r| r <= self.tol.recon).unwrap_or(false)
    }

    /// A-selfadjoint and `AT ≥ 0`.
    pub fn is_a_positive(&self, t: &ComplexMatrix) -> bool {
        if !self.is_a_selfadjoint(t) {
            return false;
        }
        let at = self.a.matmul(t);
        let scale = at.frobenius_norm().max(1.0);
        match hermitian_eigenvalues(&at.hermitian_part()) {
            Ok(ev) => ev.last().map_or(true, |&l| l >= -self.tol.recon * scale),
            Err(_) => false,
        }
    }
}

/// Classical quantities of an already reduced matrix.
pub fn reduced_quantities(reduced: &ComplexMatrix, opts: &SweepOptions) -> Result<AQuantities> {
    let seminorm = spectral_norm(reduced)?;
    let (w, c) = radius_and_crawford(reduced, opts)?;
    let m = min_singular_value(reduced)?;
    Ok(AQuantities { seminorm, w, c, m })
}

/// Free-function form of [`SemiHilbertContext::new`].
pub fn make_context(a: &ComplexMatrix, rank_tol_override: Option<f64>) -> Result<SemiHilbertContext> {
    SemiHilbertContext::new(a, rank_tol_override)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};

    fn m(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows)
    }

    fn jordan() -> ComplexMatrix {
        m(&[&[0.0, 1.0], &[0.0, 0.0]])
    }

    fn ctx(a: &ComplexMatrix) -> SemiHilbertContext {
        SemiHilbertContext::new(a, None).unwrap()
    }

    fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix) {
        assert!(a.distance(b) < 1e-13, "{a:?} vs {b:?}");
    }

    #[test]
    fn context_examples() {
        let c = ctx(&ComplexMatrix::identity(2));
        assert_eq!(c.rank(), 2);
        assert_close(c.a_pinv(), &ComplexMatrix::identity(2));
        assert_close(c.projector(), &ComplexMatrix::identity(2));

        let c = ctx(&ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        assert_eq!(c.rank(), 1);
        assert_close(c.a_pinv(), &ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        assert_close(c.projector(), &ComplexMatrix::from_real_diag(&[1.0, 0.0]));

        let c = ctx(&ComplexMatrix::from_real_diag(&[4.0, 1.0]));
        assert_close(c.a_half(), &ComplexMatrix::from_real_diag(&[2.0, 1.0]));
        assert_close(c.a_half_pinv(), &ComplexMatrix::from_real_diag(&[0.5, 1.0]));
    }

    #[test]
    fn context_errors() {
        assert_eq!(SemiHilbertContext::new(&ComplexMatrix::zeros(2, 2), None).unwrap_err(), Error::ZeroOperator);
        assert!(matches!(
            SemiHilbertContext::new(&ComplexMatrix::from_real_diag(&[1.0, -1.0]), None),
            Err(Error::NotPsd { .. })
        ));
        assert!(matches!(SemiHilbertContext::new(&jordan(), None), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn semi_inner_product_examples() {
        let e1 = [ONE, ZERO];
        let e2 = [ZERO, ONE];
        assert_eq!(ctx(&ComplexMatrix::identity(2)).a_inner(&e1, &e1).unwrap(), ONE);
        assert_eq!(ctx(&ComplexMatrix::from_real_diag(&[1.0, 0.0])).a_inner(&e2, &e2).unwrap(), ZERO);
        let c = ctx(&ComplexMatrix::from_real_diag(&[4.0, 1.0]));
        assert_eq!(c.a_inner(&[ONE, ONE], &e1).unwrap(), C64::new(4.0, 0.0));
        assert!(matches!(c.a_inner(&[ONE], &e1), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn membership_examples() {
        let c = ctx(&ComplexMatrix::from_real_diag(&[2.0, 3.0]));
        assert!(c.in_ba(&jordan()));

        let c = ctx(&ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        let res = c.membership(&jordan()).unwrap();
        assert!(!res.member);
        assert!((res.residual - 1.0).abs() < 1e-14);

        let t = ComplexMatrix::from_rows(&[&[C64::new(0.3, 1.0), ZERO], &[C64::new(-2.0, 0.5), C64::new(7.0, 0.0)]]);
        let res = c.membership(&t).unwrap();
        assert!(res.member && res.residual == 0.0 && !res.borderline);
    }

    #[test]
    fn sharp_examples() {
        let t = ComplexMatrix::from_rows(&[&[C64::new(1.0, 2.0), C64::new(0.0, 1.0)], &[C64::new(3.0, 0.0), ZERO]]);
        let c = ctx(&ComplexMatrix::identity(2));
        assert_close(&c.sharp(&t).unwrap(), &t.adjoint());

        let c = ctx(&ComplexMatrix::from_real_diag(&[4.0, 1.0]));
        assert_close(&c.sharp(&jordan()).unwrap(), &m(&[&[0.0, 0.0], &[4.0, 0.0]]));

        let c = ctx(&ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        let d = ComplexMatrix::from_diag(&[C64::new(2.0, 3.0), C64::new(-1.0, 1.0)]);
        let s = c.sharp(&d).unwrap();
        assert_close(&s, &ComplexMatrix::from_diag(&[C64::new(2.0, -3.0), ZERO]));
        assert_close(&c.a().matmul(&s), &d.adjoint().matmul(c.a()));
        assert!(matches!(c.sharp(&jordan()), Err(Error::NotInBA { .. })));
    }

    #[test]
    fn tilde_examples() {
        let t = ComplexMatrix::from_rows(&[&[C64::new(1.0, 2.0), C64::new(0.0, 1.0)], &[C64::new(3.0, 0.0), ZERO]]);
        let c = ctx(&ComplexMatrix::identity(2));
        assert_close(&c.tilde(&t).unwrap(), &t);

        let c = ctx(&ComplexMatrix::from_real_diag(&[4.0, 1.0]));
        let tt = c.tilde(&jordan()).unwrap();
        assert_close(&tt, &m(&[&[0.0, 2.0], &[0.0, 0.0]]));
        // A^{1/2} T = lift(T̃) A^{1/2}
        let lhs = c.a_half().matmul(&jordan());
        let rhs = c.lift(&tt).unwrap().matmul(c.a_half());
        assert_close(&lhs, &rhs);

        let c = ctx(&ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        let t = ComplexMatrix::from_rows(&[&[C64::new(0.5, -1.0), ZERO], &[C64::new(2.0, 0.0), C64::new(3.0, 1.0)]]);
        let tt = c.tilde(&t).unwrap();
        assert_eq!((tt.rows(), tt.cols()), (1, 1));
        assert!((tt[(0, 0)] - C64::new(0.5, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn quantities_examples() {
        let o = SweepOptions::default();
        let q = ctx(&ComplexMatrix::identity(2)).a_quantities(&jordan(), &o).unwrap();
        assert!((q.seminorm - 1.0).abs() < 1e-12 && (q.w - 0.5).abs() < 1e-12);
        assert!(q.c.abs() < 1e-12 && q.m.abs() < 1e-12);

        let q = ctx(&ComplexMatrix::from_real_diag(&[4.0, 1.0])).a_quantities(&jordan(), &o).unwrap();
        assert!((q.seminorm - 2.0).abs() < 1e-12 && (q.w - 1.0).abs() < 1e-12);

        let q = ctx(&ComplexMatrix::identity(2)).a_quantities(&ComplexMatrix::identity(2), &o).unwrap();
        for v in [q.seminorm, q.w, q.c, q.m] {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cartesian_examples() {
        let c = ctx(&ComplexMatrix::identity(2));
        let h = ComplexMatrix::from_rows(&[&[ONE, I], &[-I, C64::new(2.0, 0.0)]]);
        let (re, im) = c.cartesian_parts(&h).unwrap();
        assert_close(&re, &h);
        assert!(im.frobenius_norm() < 1e-15);

        let (re, im) = c.cartesian_parts(&jordan()).unwrap();
        assert_close(&re, &m(&[&[0.0, 0.5], &[0.5, 0.0]]));
        let want_im = m(&[&[0.0, 1.0], &[-1.0, 0.0]]).scale(C64::new(0.0, -0.5));
        assert_close(&im, &want_im);
        assert_close(&(&re + &im.scale(I)), &jordan());

        let c = ctx(&ComplexMatrix::from_real_diag(&[4.0, 1.0]));
        let (re, im) = c.cartesian_parts(&jordan()).unwrap();
        assert_close(&re, &m(&[&[0.0, 0.5], &[2.0, 0.0]]));
        assert!(c.is_a_selfadjoint(&re));
        assert!(c.is_a_selfadjoint(&im));
        assert!(!c.is_a_selfadjoint(&jordan()));
    }

    #[test]
    fn positivity_predicates() {
        let a = m(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let c = ctx(&a);
        assert!(c.is_a_positive(&a));
        assert!(c.is_a_positive(&ComplexMatrix::identity(2)));
        assert!(!c.is_a_positive(&ComplexMatrix::identity(2).scale_real(-1.0)));
        let ci = ctx(&ComplexMatrix::identity(2));
        assert!(ci.is_a_selfadjoint(&ComplexMatrix::from_real_diag(&[1.0, -1.0])));
        assert!(!ci.is_a_positive(&ComplexMatrix::from_real_diag(&[1.0, -1.0])));
    }
}
