//! Running every check over generated or supplied instances.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate, witness_digest, Evaluator, InequalityReport, Operands, TheoremId};
use crate::ensembles::{default_ranks, Family, SeedPath, SpectrumLaw, TrialKey, Witness};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::numrange::SweepOptions;
use crate::semihilbert::SemiHilbertContext;
use crate::tol::VERDICT_TOL;

/// Rank of `A` relative to the dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum RankSelector {
    /// `n`.
    Full,
    /// `n − 1`.
    MinusOne,
    /// `⌈n/2⌉`.
    Half,
    Exact(usize),
}

impl RankSelector {
    pub const DEFAULT: [RankSelector; 3] = [RankSelector::Full, RankSelector::MinusOne, RankSelector::Half];

    pub fn resolve(self, n: usize) -> usize {
        match self {
            RankSelector::Full => n,
            RankSelector::MinusOne => n.saturating_sub(1),
            RankSelector::Half => n.div_ceil(2),
            RankSelector::Exact(k) => k,
        }
    }
}

impl fmt::Display for RankSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankSelector::Full => f.write_str("n"),
            RankSelector::MinusOne => f.write_str("n-1"),
            RankSelector::Half => f.write_str("half"),
            RankSelector::Exact(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for RankSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "n" => Ok(RankSelector::Full),
            "n-1" => Ok(RankSelector::MinusOne),
            "half" => Ok(RankSelector::Half),
            other => other.parse::<usize>().map(RankSelector::Exact).map_err(|_| {
                Error::InvalidOptions(format!("rank selector must be n, n-1, half or an integer, got {other:?}"))
            }),
        }
    }
}

impl From<RankSelector> for String {
    fn from(r: RankSelector) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for RankSelector {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Everything that determines the content of a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub dims: Vec<usize>,
    pub ranks: Vec<RankSelector>,
    pub families: Vec<Family>,
    /// Laws rotate with the trial index inside each cell.
    pub laws: Vec<SpectrumLaw>,
    pub count: usize,
    pub seed: u64,
    pub tol: f64,
    pub theorems: Vec<TheoremId>,
    pub sweep: SweepOptions,
    /// Number of smallest-slack witnesses kept in the summary.
    pub witnesses: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 3, 4, 6],
            ranks: RankSelector::DEFAULT.to_vec(),
            families: Family::ALL.to_vec(),
            laws: SpectrumLaw::ALL.to_vec(),
            count: 250,
            seed: 0,
            tol: VERDICT_TOL,
            theorems: TheoremId::ALL.to_vec(),
            sweep: SweepOptions::default(),
            witnesses: 5,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        self.sweep.validate()?;
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::InvalidOptions(format!("tolerance must be finite and non-negative, got {}", self.tol)));
        }
        if self.dims.contains(&0) {
            return Err(Error::InvalidOptions("dimensions must be positive".into()));
        }
        if self.laws.is_empty() && !self.dims.is_empty() && !self.families.is_empty() && self.count > 0 {
            return Err(Error::InvalidOptions("at least one spectrum law is required".into()));
        }
        Ok(())
    }

    /// Distinct valid ranks for dimension `n`, descending.
    pub fn ranks_for(&self, n: usize) -> Vec<usize> {
        let mut r: Vec<usize> = self.ranks.iter().map(|s| s.resolve(n)).filter(|&k| k >= 1 && k <= n).collect();
        if self.ranks.is_empty() {
            r = default_ranks(n);
        }
        r.sort_unstable_by(|a, b| b.cmp(a));
        r.dedup();
        r
    }

    /// Trial keys in report order.
    pub fn trial_keys(&self) -> Vec<TrialKey> {
        let mut keys = Vec::new();
        for &n in &self.dims {
            for rank in self.ranks_for(n) {
                for &family in &self.families {
                    for index in 0..self.count as u64 {
                        let law = self.laws[index as usize % self.laws.len()];
                        keys.push(TrialKey { n, rank, family, law, index });
                    }
                }
            }
        }
        keys
    }
}

/// An explicitly supplied instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialInput {
    #[serde(rename = "A")]
    pub a: ComplexMatrix,
    pub operators: Operands,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    /// The trial could not be evaluated; no chains were produced.
    Error {
        kind: String,
        message: String,
    },
}

/// A chain that was not evaluated on this trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCheck {
    pub theorem_id: TheoremId,
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<TrialKey>,
    #[serde(flatten)]
    pub status: TrialStatus,
    /// Largest membership residual among the operators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub membership_residual: Option<f64>,
    pub borderline: bool,
    pub reports: Vec<InequalityReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkippedCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremSummary {
    pub theorem_id: TheoremId,
    pub count: usize,
    pub violations: usize,
    pub min_slack: Option<f64>,
    pub min_relative_slack: Option<f64>,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub empty: bool,
    pub trials: usize,
    pub failed_trials: usize,
    pub borderline_trials: usize,
    pub reports: usize,
    pub violations: usize,
    pub theorems: Vec<TheoremSummary>,
    /// Reports with the smallest relative slack, most critical first.
    pub worst: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRun {
    pub trials: Vec<TrialOutcome>,
    pub summary: Summary,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NotSquare { .. } => "not_square",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::BadShape { .. } => "bad_shape",
        Error::NonFinite => "non_finite",
        Error::NotHermitian { .. } => "not_hermitian",
        Error::NotPsd { .. } => "not_psd",
        Error::ZeroOperator => "zero_operator",
        Error::ConvergenceFailure { .. } => "convergence_failure",
        Error::NotInBA { .. } => "not_in_ba",
        Error::ConditionNotMet { .. } => "condition_not_met",
        Error::UnknownKind(_) => "unknown_kind",
        Error::UnknownTheorem(_) => "unknown_theorem",
        Error::InvalidOptions(_) => "invalid_options",
        Error::DegenerateSample => "degenerate_sample",
    }
}

fn failed(index: usize, key: Option<TrialKey>, e: &Error, residual: Option<f64>) -> TrialOutcome {
    TrialOutcome {
        index,
        key,
        status: TrialStatus::Error { kind: error_kind(e).to_string(), message: e.to_string() },
        membership_residual: residual,
        borderline: false,
        reports: Vec::new(),
        skipped: Vec::new(),
    }
}

fn run_trial(
    index: usize,
    key: Option<TrialKey>,
    ctx: &SemiHilbertContext,
    ops: &Operands,
    ids: &[TheoremId],
    sweep: &SweepOptions,
    tol: f64,
) -> TrialOutcome {
    let mut worst = 0.0f64;
    let mut borderline = false;
    for (_, m) in ops.named() {
        match ctx.membership(m) {
            Ok(mem) => {
                worst = worst.max(mem.residual);
                borderline |= mem.borderline;
                if !mem.member {
                    return failed(index, key, &Error::NotInBA { residual: mem.residual }, Some(mem.residual));
                }
            }
            Err(e) => return failed(index, key, &e, None),
        }
    }
    let eval = match Evaluator::new(ctx, ops, sweep) {
        Ok(e) => e,
        Err(e) => return failed(index, key, &e, Some(worst)),
    };
    let digest = witness_digest(ctx.a(), ops);
    let mut reports = Vec::with_capacity(ids.len());
    let mut skipped = Vec::new();
    for &id in ids {
        if !ops.supports(id) {
            skipped.push(SkippedCheck { theorem_id: id, reason: "missing_operands".into(), residual: None });
            continue;
        }
        match evaluate(&eval, ctx, id, tol, &digest) {
            Ok(r) => reports.push(r),
            Err(Error::ConditionNotMet { residual }) => skipped.push(SkippedCheck {
                theorem_id: id,
                reason: "condition_not_met".into(),
                residual: Some(residual),
            }),
            Err(e) => return failed(index, key, &e, Some(worst)),
        }
    }
    TrialOutcome { index, key, status: TrialStatus::Ok, membership_residual: Some(worst), borderline, reports, skipped }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(Error::InvalidOptions("jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidOptions(format!("thread pool: {e}")))
}

/// Runs the selected checks on explicit instances. Failing instances are
/// reported per trial and do not abort the run.
pub fn run_instances(
    inputs: &[TrialInput],
    ids: &[TheoremId],
    sweep: &SweepOptions,
    tol: f64,
    witnesses: usize,
    jobs: usize,
) -> Result<SuiteRun> {
    sweep.validate()?;
    let trials: Vec<TrialOutcome> = pool(jobs)?.install(|| {
        inputs
            .par_iter()
            .enumerate()
            .map(|(i, input)| match SemiHilbertContext::new(&input.a, None) {
                Ok(ctx) => run_trial(i, None, &ctx, &input.operators, ids, sweep, tol),
                Err(e) => failed(i, None, &e, None),
            })
            .collect()
    });
    let summary =
        summarize(&trials, ids, witnesses, |i| Some((inputs[i].a.clone(), inputs[i].operators.clone(), None)));
    Ok(SuiteRun { trials, summary })
}

/// Generates and checks every trial of `config`. The result does not depend
/// on `jobs`.
pub fn run_suite(config: &SuiteConfig, jobs: usize) -> Result<SuiteRun> {
    config.validate()?;
    let keys = config.trial_keys();
    let seed = config.seed;
    let trials: Vec<TrialOutcome> = pool(jobs)?.install(|| {
        keys.par_iter()
            .enumerate()
            .map(|(i, key)| match key.generate(seed) {
                Ok(g) => run_trial(i, Some(*key), &g.ctx, &g.operands, &config.theorems, &config.sweep, config.tol),
                Err(e) => failed(i, Some(*key), &e, None),
            })
            .collect()
    });
    let summary = summarize(&trials, &config.theorems, config.witnesses, |i| {
        let key = keys[i];
        let g = key.generate(seed).ok()?;
        Some((g.a, g.operands, Some(SeedPath { master_seed: seed, trial: key, search: None })))
    });
    Ok(SuiteRun { trials, summary })
}

type Instance = (ComplexMatrix, Operands, Option<SeedPath>);

fn summarize(
    trials: &[TrialOutcome],
    ids: &[TheoremId],
    witnesses: usize,
    instance: impl Fn(usize) -> Option<Instance>,
) -> Summary {
    let mut per: Vec<TheoremSummary> = ids
        .iter()
        .map(|&id| TheoremSummary {
            theorem_id: id,
            count: 0,
            violations: 0,
            min_slack: None,
            min_relative_slack: None,
            skipped: 0,
        })
        .collect();
    let slot = |id: TheoremId| ids.iter().position(|&x| x == id);
    let mut ranked: Vec<(f64, usize, usize)> = Vec::new();
    let mut reports = 0;
    let mut violations = 0;
    for t in trials {
        for (j, r) in t.reports.iter().enumerate() {
            reports += 1;
            violations += usize::from(!r.satisfied);
            ranked.push((r.min_relative_slack, t.index, j));
            if let Some(k) = slot(r.theorem_id) {
                let s = &mut per[k];
                s.count += 1;
                s.violations += usize::from(!r.satisfied);
                let m = r.min_slack();
                s.min_slack = Some(s.min_slack.map_or(m, |x| x.min(m)));
                let rel = r.min_relative_slack;
                s.min_relative_slack = Some(s.min_relative_slack.map_or(rel, |x| x.min(rel)));
            }
        }
        for sk in &t.skipped {
            if let Some(k) = slot(sk.theorem_id) {
                per[k].skipped += 1;
            }
        }
    }
    // NaN slacks sort first: they are the most suspicious.
    ranked.sort_by(|a, b| {
        let key = |x: f64| if x.is_nan() { f64::NEG_INFINITY } else { x };
        key(a.0).total_cmp(&key(b.0)).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
    });
    let worst = ranked
        .iter()
        .take(witnesses)
        .filter_map(|&(_, i, j)| {
            let (a, ops, seed_path) = instance(i)?;
            Some(Witness::from_report(&a, &ops, &trials[i].reports[j], seed_path))
        })
        .collect();
    Summary {
        empty: trials.is_empty(),
        trials: trials.len(),
        failed_trials: trials.iter().filter(|t| t.status != TrialStatus::Ok).count(),
        borderline_trials: trials.iter().filter(|t| t.borderline).count(),
        reports,
        violations,
        theorems: per,
        worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(count: usize, seed: u64) -> SuiteConfig {
        SuiteConfig { dims: vec![2], count, seed, ..Default::default() }
    }

    #[test]
    fn rank_selectors() {
        assert_eq!("n-1".parse::<RankSelector>().unwrap().resolve(4), 3);
        assert_eq!("half".parse::<RankSelector>().unwrap().resolve(5), 3);
        assert_eq!("2".parse::<RankSelector>().unwrap(), RankSelector::Exact(2));
        assert!("third".parse::<RankSelector>().is_err());
        let c = SuiteConfig { ranks: vec![RankSelector::Exact(9), RankSelector::Full], ..Default::default() };
        assert_eq!(c.ranks_for(3), vec![3]);
        assert_eq!(SuiteConfig::default().ranks_for(2), vec![2, 1]);
    }

    #[test]
    fn seeded_suite_has_no_violations() {
        let run = run_suite(&small(10, 42), 1).unwrap();
        assert_eq!(run.trials.len(), 2 * 4 * 10);
        assert_eq!(run.summary.violations, 0);
        assert_eq!(run.summary.failed_trials, 0);
        for t in &run.summary.theorems {
            if let Some(m) = t.min_relative_slack {
                assert!(m >= -1e-8, "{}: {m}", t.theorem_id);
            }
        }
        assert_eq!(run.summary.worst.len(), 5);
        let w = &run.summary.worst[0];
        let key = w.seed_path.as_ref().unwrap().trial;
        let g = key.generate(42).unwrap();
        assert_eq!(g.a.as_slice(), w.a.as_slice());
    }

    #[test]
    fn empty_and_error_paths() {
        let run = run_instances(&[], &TheoremId::ALL, &SweepOptions::default(), 1e-8, 3, 1).unwrap();
        assert!(run.summary.empty && run.trials.is_empty());

        let j = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let inputs = vec![
            TrialInput { a: ComplexMatrix::identity(2), operators: Operands::t(j.clone()) },
            TrialInput { a: ComplexMatrix::from_real_diag(&[1.0, 0.0]), operators: Operands::t(j.clone()) },
            TrialInput { a: ComplexMatrix::from_real_diag(&[1.0, -1.0]), operators: Operands::t(j) },
        ];
        let run = run_instances(&inputs, &TheoremId::ALL, &SweepOptions::default(), 1e-8, 3, 2).unwrap();
        assert_eq!(run.trials[0].status, TrialStatus::Ok);
        assert!(run.trials[0].skipped.iter().any(|s| s.reason == "missing_operands"));
        assert!(run.trials[0].skipped.iter().any(|s| s.reason == "condition_not_met"));
        assert!(matches!(&run.trials[1].status, TrialStatus::Error { kind, .. } if kind == "not_in_ba"));
        assert!(matches!(&run.trials[2].status, TrialStatus::Error { kind, .. } if kind == "not_psd"));
        assert_eq!(run.summary.failed_trials, 2);
        assert_eq!(run.summary.violations, 0);
    }

    #[test]
    fn filtering_and_job_independence() {
        let mut c = small(5, 7);
        c.theorems = vec![TheoremId::Thm21];
        let a = run_suite(&c, 1).unwrap();
        assert!(a.trials.iter().flat_map(|t| &t.reports).all(|r| r.theorem_id == TheoremId::Thm21));
        let b = run_suite(&c, 3).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(run_suite(&c, 0).is_err());
    }
}
