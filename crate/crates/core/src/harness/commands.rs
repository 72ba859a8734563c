//! `compute`, `verify`, `tightness` and `range`.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::problem::Problem;
use super::report::{RunReport, Timing, ToleranceRecord};
use super::HarnessError;
use crate::ensembles::{stream_rng, tag, tightness_search, SeedPath, TightnessOptions, TrialKey, Witness};
use crate::error::Error;
use crate::inequalities::{run_suite, Arity, Operands, SuiteConfig, TheoremId};
use crate::linalg::ComplexMatrix;
use crate::numrange::{range_boundary, RangeBoundary, SweepOptions};
use crate::semihilbert::{AQuantities, Membership};

/// Per-operator result of `compute`. Everything past the membership test is
/// absent for operators outside `B_A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorOutput {
    pub membership: Membership,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sharp: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tilde: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantities: Option<AQuantities>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeOutput {
    pub tool_version: String,
    pub n: usize,
    pub rank: usize,
    pub tolerances: ToleranceRecord,
    pub operators: BTreeMap<String, OperatorOutput>,
}

impl ComputeOutput {
    /// Largest residual among operators outside `B_A`.
    pub fn worst_non_member(&self) -> Option<f64> {
        self.operators.values().filter(|o| !o.membership.member).map(|o| o.membership.residual).reduce(f64::max)
    }
}

pub fn compute(problem: &Problem, sweep: &SweepOptions) -> Result<ComputeOutput, HarnessError> {
    sweep.validate()?;
    let ctx = &problem.ctx;
    let mut operators = BTreeMap::new();
    for (name, t) in problem.named() {
        let membership = ctx.membership(t)?;
        let mut out = OperatorOutput { membership, sharp: None, tilde: None, quantities: None };
        if membership.member {
            out.sharp = Some(ctx.sharp_unchecked(t));
            out.tilde = Some(ctx.tilde_unchecked(t));
            out.quantities = Some(ctx.a_quantities(t, sweep)?);
        }
        operators.insert(name.to_string(), out);
    }
    Ok(ComputeOutput {
        tool_version: super::TOOL_VERSION.to_string(),
        n: ctx.dim(),
        rank: ctx.rank(),
        tolerances: ToleranceRecord::new(crate::inequalities::DEFAULT_TOL, *sweep),
        operators,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRequest {
    pub config: SuiteConfig,
    pub jobs: usize,
}

pub fn verify(req: &VerifyRequest) -> Result<RunReport, HarnessError> {
    let start = Instant::now();
    let run = run_suite(&req.config, req.jobs)?;
    let timing = Timing { wall_seconds: start.elapsed().as_secs_f64(), jobs: req.jobs };
    Ok(RunReport::new(&req.config, run, timing))
}

/// Where `tightness` starts: the operators of one generated trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TightnessRequest {
    pub theorem: TheoremId,
    pub seed: u64,
    pub trial: TrialKey,
    pub search: TightnessOptions,
    pub sweep: SweepOptions,
}

pub fn tightness(req: &TightnessRequest) -> Result<Witness, HarnessError> {
    req.search.validate()?;
    req.sweep.validate()?;
    let trial = req.trial.generate(req.seed)?;
    let start = match req.theorem.arity() {
        Arity::T => Operands::t(trial.operands.t.clone()),
        Arity::ST => Operands { x: None, ..trial.operands.clone() },
        Arity::STX => trial.operands.clone(),
    };
    let mut rng = stream_rng(req.seed, &req.trial.path(), tag::SEARCH);
    let result = tightness_search(&trial.ctx, req.theorem, &start, &req.search, &req.sweep, &mut rng)?;
    let seed_path = SeedPath { master_seed: req.seed, trial: req.trial, search: Some(req.search) };
    Ok(Witness::from_report(&trial.a, &result.operands, &result.report, Some(seed_path)))
}

/// Boundary of `W(T̃)` for the named operator.
pub fn range(problem: &Problem, operator: &str, points: usize) -> Result<RangeBoundary, HarnessError> {
    if points < 3 {
        return Err(Error::InvalidOptions(format!("--points must be at least 3, got {points}")).into());
    }
    let t = problem.operator(operator)?;
    let reduced = problem.ctx.tilde(t)?;
    Ok(range_boundary(&reduced, points)?)
}

/// Writes `theta,re,im` rows.
pub fn range_csv(boundary: &RangeBoundary, out: impl Write) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "re", "im"])?;
    for (theta, z) in boundary.thetas.iter().zip(&boundary.points) {
        w.write_record([theta.to_string(), z.re.to_string(), z.im.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{Family, SpectrumLaw};
    use crate::harness::ProblemFile;

    fn problem(a: &str, t: &str) -> Problem {
        let text = format!(r#"{{"n": 2, "A": {a}, "operators": {{"T": {t}}}}}"#);
        ProblemFile::from_json(&text).unwrap().validate(None).unwrap()
    }

    const I2: &str = "[[[1,0],[0,0]],[[0,0],[1,0]]]";
    const J: &str = "[[[0,0],[1,0]],[[0,0],[0,0]]]";

    #[test]
    fn compute_on_jordan() {
        let out = compute(&problem(I2, J), &SweepOptions::default()).unwrap();
        let q = out.operators["T"].quantities.unwrap();
        assert!((q.w - 0.5).abs() < 1e-10);
        assert!((q.seminorm - 1.0).abs() < 1e-12);
        assert!(q.c.abs() < 1e-10 && q.m.abs() < 1e-12);
        assert!(out.worst_non_member().is_none());
    }

    #[test]
    fn compute_reports_non_members() {
        let out = compute(&problem("[[[1,0],[0,0]],[[0,0],[0,0]]]", J), &SweepOptions::default()).unwrap();
        let t = &out.operators["T"];
        assert!(!t.membership.member && t.sharp.is_none());
        assert!(out.worst_non_member().unwrap() > 0.1);
    }

    #[test]
    fn range_validation_and_disk() {
        let p = problem(I2, J);
        assert_eq!(range(&p, "T", 2).unwrap_err().exit_code(), super::super::EXIT_USAGE);
        let b = range(&p, "T", 8).unwrap();
        assert!(b.points.iter().all(|z| (z.norm() - 0.5).abs() < 1e-8));
        let mut buf = Vec::new();
        range_csv(&b, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 9);
        assert!(text.starts_with("theta,re,im\n"));
        let q = problem("[[[1,0],[0,0]],[[0,0],[0,0]]]", J);
        assert_eq!(range(&q, "T", 8).unwrap_err().exit_code(), super::super::EXIT_NOT_IN_BA);
    }

    #[test]
    fn tightness_with_zero_iterations_is_the_start() {
        let trial = TrialKey { n: 2, rank: 2, family: Family::GeneralInBa, law: SpectrumLaw::Uniform, index: 0 };
        let req = TightnessRequest {
            theorem: TheoremId::Base12,
            seed: 4,
            trial,
            search: TightnessOptions { iters: 0, ..Default::default() },
            sweep: SweepOptions::default(),
        };
        let w = tightness(&req).unwrap();
        let g = trial.generate(4).unwrap();
        assert_eq!(w.operators.t, g.operands.t);
        assert!(w.operators.s.is_none());
    }
}
