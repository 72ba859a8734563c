//! Default numerical tolerances, kept in one place.
//!
//! All values are relative unless the name says otherwise. A
//! [`Tolerances`] record travels with every [`SemiHilbertContext`] and is
//! echoed into every run report.
//!
//! [`SemiHilbertContext`]: crate::semihilbert::SemiHilbertContext

use serde::{Deserialize, Serialize};

/// Allowed relative departure from Hermitian symmetry, `‖H − H*‖_F / ‖H‖_F`.
pub const HERM_TOL: f64 = 1e-10;

/// Relative reconstruction residual of the spectral kernels.
pub const RECON_TOL: f64 = 1e-10;

/// Relative membership residual for the range condition `T*(R(A)) ⊆ R(A)`.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Membership residuals within this factor of the threshold are flagged.
pub const BORDERLINE_FACTOR: f64 = 10.0;

/// Relative residual under which the vanishing condition
/// `A(T + T♯)²(T − T♯)² = 0` is considered met.
pub const CONDITION_TOL: f64 = 1e-12;

/// Relative slack tolerance for inequality verdicts.
pub const VERDICT_TOL: f64 = 1e-8;

/// Rank cutoff factor: `τ = n · RANK_EPS · λ_max`.
pub const RANK_EPS: f64 = f64::EPSILON;

/// Tolerance record carried by a context.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub herm: f64,
    pub recon: f64,
    pub membership: f64,
    pub condition: f64,
    /// Absolute eigenvalue cutoff used for the rank of `A`.
    pub rank: f64,
}

impl Tolerances {
    pub fn with_rank(rank: f64) -> Self {
        Self { herm: HERM_TOL, recon: RECON_TOL, membership: MEMBERSHIP_TOL, condition: CONDITION_TOL, rank }
    }
}

/// Default absolute rank cutoff for a PSD matrix of order `n` whose largest
/// eigenvalue is `lambda_max`.
pub fn default_rank_cutoff(n: usize, lambda_max: f64) -> f64 {
    n as f64 * RANK_EPS * lambda_max.max(0.0)
}
