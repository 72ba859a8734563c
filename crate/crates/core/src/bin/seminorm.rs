//! `seminorm`: A-quantities, inequality verification and tightness search.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use seminorm::ensembles::{Family, SpectrumLaw, TightnessOptions, TrialKey};
use seminorm::error::Error;
use seminorm::harness::{
    self, HarnessError, ProblemFile, TightnessRequest, VerifyRequest, EXIT_NOT_IN_BA, EXIT_OK, EXIT_USAGE,
    EXIT_VIOLATIONS, SEED_ENV,
};
use seminorm::inequalities::{RankSelector, SuiteConfig, TheoremId, DEFAULT_TOL};
use seminorm::numrange::SweepOptions;

#[derive(Parser)]
#[command(name = "seminorm", version, about = "A-seminorms, A-numerical radii and inequality checks for matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Membership, A-adjoint, tilde reduction and A-quantities of each operator in a problem file.
    Compute {
        input: PathBuf,
        /// Absolute eigenvalue cutoff for the rank of A.
        #[arg(long)]
        rank_tol: Option<f64>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Run the inequality suite over a seeded ensemble.
    Verify(VerifyArgs),
    /// Search for operators that make a chain nearly tight.
    Tightness(TightnessArgs),
    /// Boundary points of the numerical range of the reduced operator, as CSV.
    Range {
        input: PathBuf,
        /// Number of boundary points, at least 3.
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long, default_value = "T")]
        operator: String,
        #[arg(long)]
        rank_tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Angles in the coarse sweep.
    #[arg(long, default_value_t = SweepOptions::default().grid_points)]
    grid_points: usize,
    /// Angular tolerance of the refinement.
    #[arg(long, default_value_t = SweepOptions::default().refine_tol)]
    refine_tol: f64,
}

impl SweepArgs {
    fn options(&self) -> SweepOptions {
        SweepOptions { grid_points: self.grid_points, refine_tol: self.refine_tol, ..SweepOptions::default() }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4, 6])]
    dims: Vec<usize>,
    /// Rank selectors: n, n-1, half or an integer.
    #[arg(long, value_delimiter = ',', default_values = ["n", "n-1", "half"])]
    ranks: Vec<RankSelector>,
    #[arg(long, value_delimiter = ',', default_values = ["general_in_BA", "a_selfadjoint", "shift_like", "unitary_scaled"])]
    families: Vec<Family>,
    #[arg(long, value_delimiter = ',', default_values = ["uniform", "loguniform", "equal"])]
    laws: Vec<SpectrumLaw>,
    /// Trials per (dimension, rank, family) cell.
    #[arg(long, default_value_t = 250)]
    count: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Theorem ids or groups to run; all when absent.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Smallest-slack witnesses kept in the summary.
    #[arg(long, default_value_t = 5)]
    witnesses: usize,
    #[command(flatten)]
    sweep: SweepArgs,
    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TightnessArgs {
    #[arg(long)]
    theorem: String,
    #[arg(long, default_value_t = TightnessOptions::default().iters)]
    iters: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Rank of A; defaults to n.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value = "general_in_BA")]
    family: Family,
    #[arg(long, default_value = "equal")]
    law: SpectrumLaw,
    /// Trial index of the starting instance.
    #[arg(long, default_value_t = 0)]
    index: u64,
    #[arg(long, default_value_t = TightnessOptions::default().step)]
    step: f64,
    #[arg(long, default_value_t = TightnessOptions::default().proposals)]
    proposals: usize,
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, HarnessError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| HarnessError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&Path>, value: &impl Serialize, pretty: bool) -> Result<(), HarnessError> {
    let mut w = open_out(path)?;
    if pretty {
        serde_json::to_writer_pretty(&mut w, value)?;
    } else {
        serde_json::to_writer(&mut w, value)?;
    }
    let io_err = |e| match path {
        Some(p) => HarnessError::io(p, e),
        None => HarnessError::io(Path::new("<stdout>"), e),
    };
    writeln!(w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn load(input: &Path, rank_tol: Option<f64>) -> Result<harness::Problem, HarnessError> {
    ProblemFile::read(input)?.validate(rank_tol)
}

fn run(cli: Cli) -> Result<u8, HarnessError> {
    match cli.command {
        Command::Compute { input, rank_tol, sweep } => {
            let out = harness::compute(&load(&input, rank_tol)?, &sweep.options())?;
            write_json(None, &out, true)?;
            if let Some(residual) = out.worst_non_member() {
                eprintln!("error: {}", Error::NotInBA { residual });
                return Ok(EXIT_NOT_IN_BA);
            }
            Ok(EXIT_OK)
        }
        Command::Verify(v) => {
            let theorems = if v.suite.is_empty() { TheoremId::ALL.to_vec() } else { TheoremId::select(&v.suite)? };
            let config = SuiteConfig {
                dims: v.dims,
                ranks: v.ranks,
                families: v.families,
                laws: v.laws,
                count: v.count,
                seed: v.seed,
                tol: v.tol,
                theorems,
                sweep: v.sweep.options(),
                witnesses: v.witnesses,
            };
            let report = harness::verify(&VerifyRequest { config, jobs: v.jobs })?;
            write_json(v.out.as_deref(), &report, false)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let s = &report.summary;
            eprintln!(
                "{} trials, {} reports, {} violations, {:.1}s",
                s.trials, s.reports, s.violations, report.timing.wall_seconds
            );
            Ok(if report.violations() == 0 { EXIT_OK } else { EXIT_VIOLATIONS })
        }
        Command::Tightness(t) => {
            let theorem: TheoremId = t.theorem.parse()?;
            let req = TightnessRequest {
                theorem,
                seed: t.seed,
                trial: TrialKey { n: t.n, rank: t.rank.unwrap_or(t.n), family: t.family, law: t.law, index: t.index },
                search: TightnessOptions { iters: t.iters, step: t.step, proposals: t.proposals, ..Default::default() },
                sweep: t.sweep.options(),
            };
            let witness = harness::tightness(&req)?;
            write_json(t.out.as_deref(), &witness, true)?;
            Ok(EXIT_OK)
        }
        Command::Range { input, points, operator, rank_tol, out } => {
            let boundary = harness::range(&load(&input, rank_tol)?, &operator, points)?;
            let w = open_out(out.as_deref())?;
            harness::range_csv(&boundary, w)?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if let HarnessError::Core(Error::NotInBA { residual }) = &e {
                println!("{}", serde_json::json!({ "error": "not_in_ba", "residual": residual }));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
