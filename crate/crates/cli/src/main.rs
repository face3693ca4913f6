//! `gssl`: score unlabeled points, run Nadaraya-Watson regression, or run
//! the RMSE simulation sweeps.
//!
//! Exit codes: 0 on success, 1 on a numerical failure, 2 on bad usage or input.

mod input;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gssl::experiment::{
    aggregate, format_summary, parse_count_list, parse_lambda, parse_lambda_list, write_records,
    ExperimentConfig,
};
use gssl::{build_graph, nw_batch, Dataset, KernelSpec, RngSeed, SimModel};

#[derive(Parser)]
#[command(name = "gssl", version, about = "Graph-based semi-supervised learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score unlabeled points with the hard (lambda = 0) or soft criterion.
    Solve(SolveArgs),
    /// Nadaraya-Watson estimates at the unlabeled points.
    Estimate(PointArgs),
    /// Run an RMSE sweep and write the records file.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct PointArgs {
    /// Labeled points, one per line; the last column is the label.
    #[arg(long)]
    labeled: PathBuf,
    /// Unlabeled points, one per line.
    #[arg(long)]
    unlabeled: PathBuf,
    /// Kernel bandwidth; defaults to (ln n / n)^(1/5) for n labeled points.
    #[arg(long)]
    bandwidth: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    points: PointArgs,
    /// Tuning parameter: 0 (hard criterion), a positive number, or `inf`.
    #[arg(long, default_value = "0", value_parser = lambda_arg)]
    lambda: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// key = value config file; inline flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = model_arg)]
    model: Option<SimModel>,
    // Spelled `::std::vec::Vec` so clap parses one comma-separated value
    // into a list instead of collecting repeated flags.
    #[arg(long, value_parser = counts_arg)]
    n_grid: Option<::std::vec::Vec<usize>>,
    #[arg(long, value_parser = counts_arg)]
    m_grid: Option<::std::vec::Vec<usize>>,
    #[arg(long, value_parser = lambdas_arg)]
    lambda_grid: Option<::std::vec::Vec<f64>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn lambda_arg(s: &str) -> Result<f64, String> {
    parse_lambda(s).map_err(|e| e.to_string())
}

fn model_arg(s: &str) -> Result<SimModel, String> {
    s.parse().map_err(|e: gssl::Error| e.to_string())
}

fn counts_arg(s: &str) -> Result<Vec<usize>, String> {
    parse_count_list(s).map_err(|e| e.to_string())
}

fn lambdas_arg(s: &str) -> Result<Vec<f64>, String> {
    parse_lambda_list(s).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<gssl::Error> for Failure {
    fn from(e: gssl::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<input::InputError> for Failure {
    fn from(e: input::InputError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load(args: &PointArgs) -> Result<(Dataset, KernelSpec), Failure> {
    let (labeled, labels) = input::read_labeled_points(&args.labeled)?;
    let unlabeled = input::read_points(&args.unlabeled)?;
    let data = Dataset::from_parts(&labeled, labels, &unlabeled)?;
    let h = match args.bandwidth {
        Some(h) => h,
        None => gssl::bandwidth(data.n_labeled())?,
    };
    Ok((data, KernelSpec::rbf(h)?))
}

fn print_values(values: &[f64]) {
    let mut out = String::new();
    for v in values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    print!("{out}");
}

fn run_solve(args: &SolveArgs) -> Result<(), Failure> {
    let (data, kernel) = load(&args.points)?;
    let graph = build_graph(&data, &kernel);
    let scores = gssl::solvers::score(&graph, data.labels(), args.lambda)?;
    print_values(scores.as_slice());
    Ok(())
}

fn run_estimate(args: &PointArgs) -> Result<(), Failure> {
    let (data, kernel) = load(args)?;
    let estimates = nw_batch(&data, &kernel)?;
    print_values(estimates.as_slice());
    Ok(())
}

fn simulate_config(args: &SimulateArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            ExperimentConfig::parse_with_base(
                &text,
                path,
                ExperimentConfig::labeled_size_study(SimModel::Model1),
            )?
        }
        None => ExperimentConfig::labeled_size_study(SimModel::Model1),
    };
    if let Some(model) = args.model {
        cfg.model = model;
    }
    if let Some(v) = &args.n_grid {
        cfg.n_grid = v.clone();
    }
    if let Some(v) = &args.m_grid {
        cfg.m_grid = v.clone();
    }
    if let Some(v) = &args.lambda_grid {
        cfg.lambda_grid = v.clone();
    }
    if let Some(r) = args.reps {
        cfg.replications = r;
    }
    if let Some(s) = args.seed {
        cfg.master_seed = RngSeed::new(s);
    }
    if let Some(out) = &args.out {
        cfg.output_path = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let cfg = simulate_config(args)?;
    let outcome = gssl::sweep(&cfg)?;
    write_records(&outcome.records, Path::new(&cfg.output_path))?;
    print!("{}", format_summary(&aggregate(&outcome.records)));
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        for f in &outcome.failures {
            eprintln!("failed: {f}");
        }
        Err(Failure::Numerical(format!(
            "{} replication(s) failed; records for the rest were written to {}",
            outcome.failures.len(),
            cfg.output_path.display()
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Estimate(args) => run_estimate(args),
        Command::Simulate(args) => run_simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
