//! Command-line front end: `gen`, `solve`, `evaluate`, `reduce`, `bench`.
//!
//! Exit codes: 0 on success, 2 on validation or usage errors, 3 when a
//! benchmark ratio breaches its regression threshold.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use minemax_core::hybrid::{choose_gamma, hybrid_to_minemax};
use minemax_core::CoveringBase;

use minemax_cli::bench::{row_from_report, rows_to_csv, rows_to_json, run_bench};
use minemax_cli::generate::{
    gen_graph, gen_metric, gen_star, wrap_hybrid, GraphParams, GraphProblem, MetricParams,
    MetricProblem, StarParams,
};
use minemax_cli::report::{evaluate_report, solve_report, RunReport, SolveOptions};
use minemax_cli::schema::{self, AnyInstance};

#[derive(Parser)]
#[command(
    name = "minemax",
    version,
    about = "Two-stage build-versus-rent planning under uncertain demand"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance file
    Gen(GenArgs),
    /// Solve an instance end to end and print a run report
    Solve(SolveArgs),
    /// Price a given solution against an instance
    Evaluate(EvaluateArgs),
    /// Rewrite a hybrid instance as an expected-maximum instance
    Reduce(ReduceArgs),
    /// Solve a corpus directory and emit a benchmark table
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    /// Root-and-leaves cut instance, one scenario per leaf
    Star,
    /// Connected random graph wrapped in mincut, mst, or steiner
    RandomGraph,
    /// Uniform planar points wrapped in kcenter or ufl
    RandomMetric,
    /// Planar points drawn around a few cluster centers
    ClusteredMetric,
    /// Existing covering instance wrapped in the hybrid objective
    HybridWrap,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    family: Family,
    /// Seed; identical parameters and seed give identical bytes
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Star leaves (ignored when --costs is given)
    #[arg(long, default_value_t = 4)]
    m: usize,
    /// Comma-separated star spoke costs
    #[arg(long, value_delimiter = ',')]
    costs: Option<Vec<f64>>,
    /// Uniform star inflation factor
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    /// Comma-separated realization probabilities (star only)
    #[arg(long, value_delimiter = ',')]
    probs: Option<Vec<f64>>,
    /// Wrapped problem: mincut|mst|steiner for graphs, kcenter|ufl for metrics
    #[arg(long)]
    problem: Option<String>,
    /// Vertices or points
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Edge count for graph families; a sparse default when omitted
    #[arg(long)]
    edges: Option<usize>,
    /// Scenario count
    #[arg(long, default_value_t = 3)]
    scenarios: usize,
    /// Center budget for k-center
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Facility count for facility location
    #[arg(long, default_value_t = 3)]
    facilities: usize,
    /// Client count for facility location
    #[arg(long, default_value_t = 3)]
    clients: usize,
    /// Cluster count for the clustered-metric family
    #[arg(long, default_value_t = 2)]
    clusters: usize,
    /// Covering instance file wrapped by hybrid-wrap
    #[arg(long)]
    base: Option<PathBuf>,
    /// Caution parameter for hybrid-wrap
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CommonSolveArgs {
    /// Seed for rounding and Monte Carlo draws
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo trials when the scenario count exceeds the exact cap
    #[arg(long, default_value_t = 100_000)]
    mc_trials: usize,
    /// Threshold-search grid ratio minus one (k-center)
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    /// Scenario-mass slack for the hybrid reduction, in (0, 1)
    #[arg(long, default_value_t = 0.01)]
    gamma_slack: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonSolveArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            seed: self.seed,
            mc_trials: self.mc_trials,
            epsilon: self.epsilon,
            gamma_slack: self.gamma_slack,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    common: CommonSolveArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    instance: PathBuf,
    /// Solution file matching the instance's problem
    #[arg(long)]
    solution: PathBuf,
    #[command(flatten)]
    common: CommonSolveArgs,
}

#[derive(Args)]
struct ReduceArgs {
    instance: PathBuf,
    /// Scenario-mass slack for choosing gamma, in (0, 1)
    #[arg(long, default_value_t = 0.01)]
    gamma_slack: f64,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of .json instance files
    corpus: PathBuf,
    #[command(flatten)]
    common: CommonSolveArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(args) => {
            let inst = generate(&args)?;
            write_output(args.out.as_deref(), &schema::serialize_instance(&inst)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve(args) => {
            let inst = schema::read_instance(&args.instance)?;
            let report = solve_report(&stem(&args.instance), &inst, &args.common.options())?;
            write_output(args.common.out.as_deref(), &render_report(&report, args.common.format)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Evaluate(args) => {
            let inst = schema::read_instance(&args.instance)?;
            let solution = fs::read_to_string(&args.solution)
                .with_context(|| format!("cannot read {}", args.solution.display()))?;
            let report =
                evaluate_report(&stem(&args.instance), &inst, &solution, &args.common.options())?;
            write_output(args.common.out.as_deref(), &render_report(&report, args.common.format)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce(args) => {
            let AnyInstance::Hybrid(hybrid) = schema::read_instance(&args.instance)? else {
                bail!("reduce expects a hybrid instance");
            };
            let gamma = choose_gamma(&hybrid, args.gamma_slack)?;
            let reduced = hybrid_to_minemax(&hybrid, gamma)?;
            let out = match reduced.base {
                CoveringBase::MinCut(mc) => AnyInstance::MinCut(mc),
                CoveringBase::Steiner(st) => AnyInstance::Steiner(st),
            };
            eprintln!("gamma = {gamma}");
            write_output(args.out.as_deref(), &schema::serialize_instance(&out)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench(args) => {
            let outcome = run_bench(&args.corpus, &args.common.options())?;
            let text = match args.common.format {
                OutputFormat::Csv => rows_to_csv(&outcome.rows)?,
                OutputFormat::Json => rows_to_json(&outcome.rows)?,
            };
            write_output(args.common.out.as_deref(), &text)?;
            if outcome.breaches > 0 {
                eprintln!("{} ratio(s) above their regression threshold", outcome.breaches);
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn generate(args: &GenArgs) -> Result<AnyInstance> {
    match args.family {
        Family::Star => gen_star(
            &StarParams {
                leaves: args.m,
                costs: args.costs.clone(),
                sigma: args.sigma,
                probs: args.probs.clone(),
            },
            args.seed,
        ),
        Family::RandomGraph => gen_graph(
            &GraphParams {
                problem: graph_problem(args.problem.as_deref())?,
                n: args.n,
                edges: args.edges,
                scenarios: args.scenarios,
            },
            args.seed,
        ),
        Family::RandomMetric | Family::ClusteredMetric => {
            let clusters = matches!(args.family, Family::ClusteredMetric)
                .then_some(args.clusters.max(1));
            gen_metric(
                &MetricParams {
                    problem: metric_problem(args.problem.as_deref())?,
                    n: args.n,
                    k: args.k,
                    facilities: args.facilities,
                    clients: args.clients,
                    scenarios: args.scenarios,
                    clusters,
                },
                args.seed,
            )
        }
        Family::HybridWrap => {
            let Some(base) = &args.base else {
                bail!("hybrid-wrap needs --base pointing at a covering instance");
            };
            wrap_hybrid(schema::read_instance(base)?, args.rho)
        }
    }
}

fn graph_problem(name: Option<&str>) -> Result<GraphProblem> {
    match name.unwrap_or("mincut") {
        "mincut" => Ok(GraphProblem::MinCut),
        "mst" => Ok(GraphProblem::Mst),
        "steiner" => Ok(GraphProblem::Steiner),
        other => bail!("graph families wrap mincut, mst, or steiner, not {other:?}"),
    }
}

fn metric_problem(name: Option<&str>) -> Result<MetricProblem> {
    match name.unwrap_or("kcenter") {
        "kcenter" => Ok(MetricProblem::KCenter),
        "ufl" => Ok(MetricProblem::Ufl),
        other => bail!("metric families wrap kcenter or ufl, not {other:?}"),
    }
}

fn render_report(report: &RunReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => {
            let mut text = serde_json::to_string_pretty(report)?;
            text.push('\n');
            Ok(text)
        }
        OutputFormat::Csv => rows_to_csv(std::slice::from_ref(&row_from_report(report))),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
