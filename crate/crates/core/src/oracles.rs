//! Brute-force sampling estimates of `w_A`, `‖·‖_A` and `c_A`.
//!
//! The estimators never touch the tilde reduction or the numerical range
//! sweep: every sample is a vector `x = U₊Λ₊^{-1/2}g` in the range of `A`,
//! normalized by `‖x‖_A`, and the quantities are evaluated from `Ax` in the
//! full space. The whitening makes the samples uniform on the `A`-unit
//! sphere. Each estimate is a supremum or infimum over a finite subset of
//! that sphere, so it bounds the exact value from one side.

use serde::{Deserialize, Serialize};

use crate::ensembles::{complex_gaussian, stream_rng, StreamRng};
use crate::error::{Error, Result};
use crate::linalg::{inner, ComplexMatrix, C64};
use crate::semihilbert::SemiHilbertContext;

/// Side of the exact value an estimate lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSide {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub value: f64,
    /// Samples that survived normalization.
    pub samples: usize,
    pub bound_side: BoundSide,
    pub seed: u64,
}

/// Samples with `‖x‖_A` at or below this are discarded.
const DEGENERATE_NORM: f64 = 1e-150;

/// Stream tag of the oracles.
const ORACLE_TAG: u64 = 0x4F52_4143_4C45;

/// Sampling stream of an oracle run keyed by `seed`.
pub fn oracle_rng(seed: u64) -> StreamRng {
    stream_rng(seed, &[], ORACLE_TAG)
}

#[derive(Clone, Copy)]
enum Quantity {
    Radius,
    Norm,
    Crawford,
}

impl Quantity {
    fn side(self) -> BoundSide {
        match self {
            Quantity::Radius | Quantity::Norm => BoundSide::Lower,
            Quantity::Crawford => BoundSide::Upper,
        }
    }
}

fn sample(
    ctx: &SemiHilbertContext,
    t: &ComplexMatrix,
    n_samples: usize,
    seed: u64,
    q: Quantity,
) -> Result<OracleEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidOptions("n_samples must be at least 1".into()));
    }
    let membership = ctx.membership(t)?;
    if !membership.member {
        return Err(Error::NotInBA { residual: membership.residual });
    }
    let r = ctx.rank();
    let a = ctx.a();
    let inv_sqrt: Vec<f64> = ctx.positive_eigenvalues().iter().map(|l| 1.0 / l.sqrt()).collect();
    let u = ctx.range_basis().scale_cols(&inv_sqrt);
    let at = a.matmul(t);
    let mut rng = oracle_rng(seed);
    let mut g = vec![C64::new(0.0, 0.0); r];
    let mut best: Option<f64> = None;
    let mut kept = 0;
    for _ in 0..n_samples {
        g.iter_mut().for_each(|z| *z = complex_gaussian(&mut rng));
        let mut x = u.matvec(&g);
        let norm = ctx.a_seminorm_vec(&x)?;
        if !(norm > DEGENERATE_NORM) {
            continue;
        }
        x.iter_mut().for_each(|z| *z /= norm);
        let v = match q {
            Quantity::Radius | Quantity::Crawford => inner(&at.matvec(&x), &x).norm(),
            Quantity::Norm => ctx.a_seminorm_vec(&t.matvec(&x))?,
        };
        kept += 1;
        best = Some(match (best, q) {
            (None, _) => v,
            (Some(b), Quantity::Crawford) => b.min(v),
            (Some(b), _) => b.max(v),
        });
    }
    let value = best.ok_or(Error::DegenerateSample)?;
    Ok(OracleEstimate { value, samples: kept, bound_side: q.side(), seed })
}

/// Lower bound for `w_A(T)`: the largest `|⟨Tx, x⟩_A|` over sampled `A`-unit `x`.
pub fn sample_w_lower(
    ctx: &SemiHilbertContext,
    t: &ComplexMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<OracleEstimate> {
    sample(ctx, t, n_samples, seed, Quantity::Radius)
}

/// Lower bound for `‖T‖_A`: the largest `‖Tx‖_A` over sampled `A`-unit `x`.
pub fn sample_norm_lower(
    ctx: &SemiHilbertContext,
    t: &ComplexMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<OracleEstimate> {
    sample(ctx, t, n_samples, seed, Quantity::Norm)
}

/// Upper bound for `c_A(T)`: the smallest `|⟨Tx, x⟩_A|` over sampled `A`-unit `x`.
pub fn sample_c_upper(
    ctx: &SemiHilbertContext,
    t: &ComplexMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<OracleEstimate> {
    sample(ctx, t, n_samples, seed, Quantity::Crawford)
}

/// Scales below this count as zero in [`soft_gap_ok`].
pub const SOFT_GAP_FLOOR: f64 = 1e-9;

/// Soft closeness: `|estimate − exact| ≤ frac · max(|exact|, scale)`.
///
/// `scale` is `w_A(T)` for every quantity; it keeps the test meaningful when
/// `c_A(T) = 0`. Scales below [`SOFT_GAP_FLOOR`] are raised to it.
pub fn soft_gap_ok(estimate: f64, exact: f64, scale: f64, frac: f64) -> bool {
    (estimate - exact).abs() <= frac * exact.abs().max(scale).max(SOFT_GAP_FLOOR)
}

/// Whether `estimate` lies on its promised side of `exact` within
/// `slack · max(1, |exact|)`.
pub fn one_sided_ok(estimate: &OracleEstimate, exact: f64, slack: f64) -> bool {
    let margin = slack * exact.abs().max(1.0);
    match estimate.bound_side {
        BoundSide::Lower => estimate.value <= exact + margin,
        BoundSide::Upper => estimate.value >= exact - margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numrange::SweepOptions;

    fn jordan() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])
    }

    fn ctx(a: &ComplexMatrix) -> SemiHilbertContext {
        SemiHilbertContext::new(a, None).unwrap()
    }

    #[test]
    fn identity_gives_one_for_every_sample() {
        for a in [ComplexMatrix::from_real_diag(&[3.0, 0.5, 0.0]), ComplexMatrix::identity(2)] {
            let c = ctx(&a);
            let t = ComplexMatrix::identity(a.rows());
            for f in [sample_w_lower, sample_norm_lower, sample_c_upper] {
                let e = f(&c, &t, 50, 3).unwrap();
                assert!((e.value - 1.0).abs() < 1e-14, "{}", e.value);
                assert_eq!(e.samples, 50);
            }
        }
    }

    #[test]
    fn jordan_radius() {
        let c = ctx(&ComplexMatrix::identity(2));
        let e = sample_w_lower(&c, &jordan(), 200_000, 11).unwrap();
        assert!(e.value >= 0.475 && e.value <= 0.5 + 1e-9, "{}", e.value);
        assert_eq!(e.bound_side, BoundSide::Lower);
        let e = sample_c_upper(&c, &jordan(), 200_000, 11).unwrap();
        assert!(e.value >= -1e-9 && e.value < 0.01, "{}", e.value);
        assert_eq!(e.bound_side, BoundSide::Upper);
    }

    #[test]
    fn single_sample_is_reproducible() {
        let c = ctx(&ComplexMatrix::from_real_diag(&[2.0, 1.0]));
        let t = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[-1.0, 0.5]]);
        let e1 = sample_w_lower(&c, &t, 1, 99).unwrap();
        let e2 = sample_w_lower(&c, &t, 1, 99).unwrap();
        assert_eq!(e1, e2);
        let w = c.a_quantities(&t, &SweepOptions::default()).unwrap().w;
        assert!(one_sided_ok(&e1, w, 1e-9));
    }

    #[test]
    fn seminorm_on_weighted_jordan() {
        let c = ctx(&ComplexMatrix::from_real_diag(&[4.0, 1.0]));
        let e = sample_norm_lower(&c, &jordan(), 200_000, 5).unwrap();
        assert!(e.value >= 1.9 && e.value <= 2.0 + 1e-9, "{}", e.value);
    }

    #[test]
    fn annihilated_range_gives_zero() {
        let c = ctx(&ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        let t = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!(c.tilde(&t).unwrap().frobenius_norm() == 0.0);
        assert_eq!(sample_norm_lower(&c, &t, 100, 1).unwrap().value, 0.0);
    }

    #[test]
    fn crawford_of_diagonal() {
        let c = ctx(&ComplexMatrix::identity(2));
        let e = sample_c_upper(&c, &ComplexMatrix::from_real_diag(&[1.0, 2.0]), 100_000, 8).unwrap();
        assert!(e.value >= 1.0 - 1e-9 && e.value <= 1.15, "{}", e.value);
    }

    #[test]
    fn rejects_bad_input() {
        let c = ctx(&ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        assert!(matches!(sample_w_lower(&c, &jordan(), 10, 1), Err(Error::NotInBA { .. })));
        assert!(matches!(sample_w_lower(&c, &ComplexMatrix::identity(2), 0, 1), Err(Error::InvalidOptions(_))));
    }
}
