//! Hill-climbing search for operators that make a chain nearly tight.
//!
//! The objective is the smallest slack of the chain divided by the largest
//! chain magnitude. Plain slacks could be driven to zero by shrinking the
//! operators; the ratio is invariant under that.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gen_operator_in_ba;
use crate::error::{Error, Result};
use crate::inequalities::{check, InequalityReport, Operands, TheoremId, DEFAULT_TOL};
use crate::linalg::ComplexMatrix;
use crate::numrange::SweepOptions;
use crate::semihilbert::SemiHilbertContext;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TightnessOptions {
    pub iters: usize,
    /// Initial perturbation size relative to `‖T‖_F / n`.
    pub step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Candidates drawn per iteration; the best one is kept.
    pub proposals: usize,
}

impl Default for TightnessOptions {
    fn default() -> Self {
        Self { iters: 1000, step: 0.1, min_step: 1e-12, max_step: 1.0, proposals: 4 }
    }
}

impl TightnessOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.step.is_finite()
            && self.step > 0.0
            && self.min_step > 0.0
            && self.max_step.is_finite()
            && self.min_step <= self.max_step
            && self.proposals >= 1;
        if !ok {
            return Err(Error::InvalidOptions(
                "tightness options need 0 < min_step ≤ max_step < ∞, step > 0 and proposals ≥ 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightnessResult {
    pub theorem_id: TheoremId,
    pub operands: Operands,
    pub report: InequalityReport,
    /// Relative min slack of the best operands.
    pub objective: f64,
    /// Best objective after each iteration; non-increasing.
    pub history: Vec<f64>,
    pub accepted: usize,
    pub iters: usize,
}

const SPREAD_DECADES: f64 = 4.0;

fn objective(report: &InequalityReport) -> f64 {
    let scale = report.chain.iter().map(|e| e.value.abs()).fold(0.0, f64::max);
    let m = report.min_slack();
    if !(scale > f64::MIN_POSITIVE) || !m.is_finite() {
        return f64::INFINITY;
    }
    m / scale
}

/// Gaussian member of `B_A` scaled to `step · ‖m‖_F / n`.
fn direction(ctx: &SemiHilbertContext, m: &ComplexMatrix, step: f64, rng: &mut impl Rng) -> ComplexMatrix {
    let n = m.rows() as f64;
    let size = (m.frobenius_norm() / n).max(f64::MIN_POSITIVE.sqrt());
    gen_operator_in_ba(ctx, rng).scale_real(step * size)
}

fn shifted(base: &Operands, delta: &Operands, factor: f64) -> Operands {
    let add = |m: &ComplexMatrix, d: &ComplexMatrix| m + &d.scale_real(factor);
    Operands {
        t: add(&base.t, &delta.t),
        s: base.s.as_ref().zip(delta.s.as_ref()).map(|(m, d)| add(m, d)),
        x: base.x.as_ref().zip(delta.x.as_ref()).map(|(m, d)| add(m, d)),
    }
}

fn try_move(
    ctx: &SemiHilbertContext,
    id: TheoremId,
    base: &Operands,
    delta: &Operands,
    factor: f64,
    sweep: &SweepOptions,
) -> Option<(InequalityReport, f64)> {
    let report = check(ctx, id, &shifted(base, delta, factor), sweep, DEFAULT_TOL).ok()?;
    let obj = objective(&report);
    Some((report, obj))
}

/// Minimizes the relative min slack of `id` starting from `start`.
///
/// Each iteration perturbs every operand by a Gaussian member of `B_A`
/// (block-lower-triangular in the eigenbasis of `A`) and keeps the candidate
/// if it lowers the objective. The step grows after an acceptance and
/// shrinks after a rejection.
pub fn tightness_search(
    ctx: &SemiHilbertContext,
    id: TheoremId,
    start: &Operands,
    opts: &TightnessOptions,
    sweep: &SweepOptions,
    rng: &mut impl Rng,
) -> Result<TightnessResult> {
    opts.validate()?;
    if !start.supports(id) {
        return Err(Error::InvalidOptions(format!("{id} needs more operators than were supplied")));
    }
    let mut best_ops = start.clone();
    let mut best = check(ctx, id, &best_ops, sweep, DEFAULT_TOL)?;
    let mut best_obj = objective(&best);
    let mut step = opts.step;
    let mut history = Vec::with_capacity(opts.iters);
    let mut accepted = 0;
    for _ in 0..opts.iters {
        // Near equality the objective is a maximum over many almost active
        // pieces; a spread of step lengths finds the thin descent cones.
        let mut round: Option<(Operands, InequalityReport, f64)> = None;
        for _ in 0..opts.proposals {
            let size = step * 10f64.powf(-SPREAD_DECADES * rng.random::<f64>());
            let delta = Operands {
                t: direction(ctx, &best_ops.t, size, rng),
                s: best_ops.s.as_ref().map(|s| direction(ctx, s, size, rng)),
                x: best_ops.x.as_ref().map(|x| direction(ctx, x, size, rng)),
            };
            if let Some((report, obj)) = try_move(ctx, id, &best_ops, &delta, 1.0, sweep) {
                if obj < round.as_ref().map_or(best_obj, |r| r.2) {
                    round = Some((delta, report, obj));
                }
            }
        }
        let improved = round.is_some();
        if let Some((delta, report, obj)) = round {
            best_ops = shifted(&best_ops, &delta, 1.0);
            best = report;
            best_obj = obj;
            // Keep doubling a successful move while it still helps.
            let mut factor = 1.0;
            while let Some((report, obj)) = try_move(ctx, id, &best_ops, &delta, factor, sweep) {
                if obj >= best_obj {
                    break;
                }
                best_ops = shifted(&best_ops, &delta, factor);
                best = report;
                best_obj = obj;
                factor *= 2.0;
            }
        }
        if improved {
            accepted += 1;
            step = (step * 1.5).min(opts.max_step);
        } else {
            step = (step * 0.8).max(opts.min_step);
        }
        history.push(best_obj);
    }
    for (_, m) in best_ops.named() {
        let residual = ctx.membership(m)?.residual;
        if residual > ctx.tolerances().membership {
            return Err(Error::NotInBA { residual });
        }
    }
    Ok(TightnessResult {
        theorem_id: id,
        operands: best_ops,
        report: best,
        objective: best_obj,
        history,
        accepted,
        iters: opts.iters,
    })
}
