mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use chaincoord::blocked::{blocked_params, compare_joint_vs_blocked};
use chaincoord::sweep::{
    linspace, manufacturer_feasibility_frontier, sweep_param, write_csv, write_csv_file, Frontier,
};
use chaincoord::verify::verify;
use chaincoord::{benchmark_problems, load_config, solve_all, Error, ModelParams, ParamField, SolverSettings};

use report::{oracle_deltas, verification_text, RunReport};

const SEED_DIR_VAR: &str = "CHAINCOORD_SEED_CONFIG_DIR";

#[derive(Parser)]
#[command(
    name = "chaincoord",
    version,
    about = "Pricing, replenishment and donation-contract solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the decentralized, centralized and coordinated systems.
    Solve(SolveArgs),
    /// Sweep one parameter and write the results as CSV.
    Sweep(SweepArgs),
    /// Run the self-check suite against the simulation oracle.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Inputs {
    /// JSON parameter file.
    config: Option<PathBuf>,
    /// Run the five bundled benchmark problems instead of one config.
    #[arg(long, conflicts_with = "config")]
    all_problems: bool,
    /// Relative tolerance for root finding.
    #[arg(long, value_name = "REL")]
    tol: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Solve the chain with the donation program switched off.
    #[arg(long)]
    blocked: bool,
    /// Emit full-precision JSON instead of the text table.
    #[arg(long)]
    json: bool,
    /// Write the report to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Print wall-clock time per problem on stderr.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Parameter to vary, by its config-file key.
    #[arg(long)]
    param: String,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    steps: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Emit the check results as JSON.
    #[arg(long)]
    json: bool,
}

/// A failure with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 2,
            error: error.into(),
        }
    }

    fn solver(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 3,
            error: error.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() { 2 } else { 3 };
        Failure { code, error: e.into() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn settings(inputs: &Inputs) -> CliResult<SolverSettings> {
    let mut s = SolverSettings::default();
    if let Some(tol) = inputs.tol {
        s.root_tol_rel = tol;
    }
    s.check()?;
    Ok(s)
}

/// Labelled parameter sets selected by the command line.
fn load_inputs(inputs: &Inputs) -> CliResult<Vec<(String, ModelParams)>> {
    if inputs.all_problems {
        return match std::env::var_os(SEED_DIR_VAR) {
            Some(dir) => (1..=5)
                .map(|i| {
                    let path = Path::new(&dir).join(format!("problem{i}.json"));
                    Ok((format!("problem{i}"), load_config(&path)?))
                })
                .collect(),
            None => Ok(benchmark_problems()
                .into_iter()
                .enumerate()
                .map(|(i, p)| (format!("problem{}", i + 1), p))
                .collect()),
        };
    }
    let path = inputs
        .config
        .as_ref()
        .ok_or_else(|| Failure::input(anyhow!("give a config file or --all-problems")))?;
    Ok(vec![(path.display().to_string(), load_config(path)?)])
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::input),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> CliResult<()> {
    let settings = settings(&args.inputs)?;
    let mut reports = Vec::new();
    for (label, params) in load_inputs(&args.inputs)? {
        let started = Instant::now();
        let effective = if args.blocked { blocked_params(&params) } else { params };
        let solutions = solve_all(&effective, &settings)?;
        let comparison = if args.blocked {
            Some(compare_joint_vs_blocked(&params, &settings)?)
        } else {
            None
        };
        let deltas = oracle_deltas(&effective, &solutions, &settings)?;
        let mut warnings: Vec<String> = solutions
            .decentralized
            .warnings
            .iter()
            .map(|w| format!("decentralized: {w}"))
            .collect();
        warnings.extend(
            solutions
                .centralized
                .warnings
                .iter()
                .map(|w| format!("centralized: {w}")),
        );
        if solutions.coordinated.deep_discount {
            warnings.push("discounted wholesale price is negative".into());
        }
        if args.timing {
            eprintln!("{label}: {:.3} ms", started.elapsed().as_secs_f64() * 1e3);
        }
        reports.push(RunReport {
            label,
            blocked: args.blocked,
            params: effective,
            solutions,
            comparison,
            oracle_deltas: deltas,
            warnings,
        });
    }
    let text = if args.json {
        let mut s = serde_json::to_string_pretty(&reports).map_err(Failure::solver)?;
        s.push('\n');
        s
    } else {
        reports.iter().map(RunReport::to_text).collect::<Vec<_>>().join("\n")
    };
    emit(&text, args.out.as_deref())
}

fn cmd_sweep(args: &SweepArgs) -> CliResult<()> {
    let field: ParamField = args.param.parse().map_err(|e: String| Failure::input(anyhow!(e)))?;
    let grid = linspace(args.from, args.to, args.steps).map_err(Failure::input)?;
    let settings = settings(&args.inputs)?;
    let inputs = load_inputs(&args.inputs)?;
    if inputs.len() != 1 {
        return Err(Failure::input(anyhow!("sweep takes a single config")));
    }
    let (_, params) = &inputs[0];
    let rows = sweep_param(params, field, &grid, &settings)?;
    match &args.out {
        Some(path) => write_csv_file(&rows, field, path)?,
        None => write_csv(&rows, field, std::io::stdout().lock())?,
    }
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    let mut summary = format!("{} rows, {failed} with errors", rows.len());
    if field == ParamField::Theta {
        let frontier = match manufacturer_feasibility_frontier(params, &settings)? {
            Frontier::Crossing(t) => format!("manufacturer coordinated profit turns negative at theta = {t:.4}"),
            Frontier::NoCrossing => {
                "manufacturer coordinated profit stays non-negative for all admissible theta".into()
            }
        };
        summary = format!("{summary}\n{frontier}");
    }
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    let settings = settings(&args.inputs)?;
    let mut all_passed = true;
    let mut results = Vec::new();
    for (label, params) in load_inputs(&args.inputs)? {
        let report = verify(&params, &settings);
        all_passed &= report.all_passed();
        results.push((label, report));
    }
    if args.json {
        let value: Vec<_> = results
            .iter()
            .map(|(label, r)| serde_json::json!({ "label": label, "report": r }))
            .collect();
        println!("{}", serde_json::to_string_pretty(&value).map_err(Failure::solver)?);
    } else {
        for (label, report) in &results {
            print!("{}", verification_text(label, report));
        }
    }
    if all_passed {
        Ok(())
    } else {
        Err(Failure {
            code: 4,
            error: anyhow!("verification failed"),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
