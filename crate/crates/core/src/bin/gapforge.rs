use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use gapforge::estimator::{orbit_distance_trace, OptimizerConfig, TRACE_TOL};
use gapforge::numkernel::{ComplexVector, C64, DEFAULT_RANK_TOL};
use gapforge::pipeline::{
    analyze, emit_report, AnalysisOptions, CartanWeights, DeclaredStructure, TimeBound,
};
use gapforge::system::{load_schedule, load_system, ComplexEntry};
use gapforge::witness::{det_sum_oracle, tensor_bound_oracle};
use gapforge::{Error, Result};

/// Minimum-time gap analysis for quantum control systems.
#[derive(Parser)]
#[command(name = "gapforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a system file and emit a gap report.
    Analyze(AnalyzeArgs),
    /// Brute-force checks of the overlap bounds.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Simulate a control schedule and trace the orbit distance against t.
    Trace(TraceArgs),
}

#[derive(Args)]
struct OptimizerArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    starts: usize,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
}

impl OptimizerArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            seed: self.seed,
            starts: self.starts,
            max_iters: self.max_iters,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    system: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    /// Rank tolerance of the bracket closure.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    tol: f64,
    #[arg(long)]
    skip_estimate: bool,
    /// Rescale the drift to operator norm 1.
    #[arg(long)]
    normalize: bool,
    /// Declare a product action on ℂᵖ⊗ℂ^q.
    #[arg(long, num_args = 2, value_names = ["P", "Q"], conflicts_with_all = ["wedge", "cartan"])]
    tensor: Option<Vec<usize>>,
    /// Declare the action on Λᵏ(ℂⁿ).
    #[arg(long, num_args = 2, value_names = ["N", "K"], conflicts_with = "cartan")]
    wedge: Option<Vec<usize>>,
    /// Declare a Cartan product; the file holds h1, l1, h2, l2.
    #[arg(long, value_name = "WEIGHTS_FILE")]
    cartan: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// max |det A + det B| over unit-row k×2k matrices and max of ∏aᵢ + ∏√(1−aᵢ²) on a grid.
    DetSum {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// max |<v⊗w, Y>| over random unit v, w against the tensor witness Y.
    TensorBound {
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct TraceArgs {
    system: PathBuf,
    /// Piecewise-constant schedule file.
    #[arg(long)]
    controls: PathBuf,
    #[arg(long)]
    horizon: f64,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Initial state as a JSON array of {re, im}; defaults to e₁.
    #[arg(long)]
    x0: Option<PathBuf>,
    #[arg(long)]
    normalize: bool,
    #[command(flatten)]
    optimizer: OptimizerArgs,
}

fn structure(args: &AnalyzeArgs) -> Result<Option<DeclaredStructure>> {
    Ok(match (&args.tensor, &args.wedge, &args.cartan) {
        (Some(t), _, _) => Some(DeclaredStructure::Tensor { p: t[0], q: t[1] }),
        (_, Some(w), _) => Some(DeclaredStructure::Wedge { n: w[0], k: w[1] }),
        (_, _, Some(path)) => Some(DeclaredStructure::Cartan(CartanWeights::load(path)?)),
        _ => None,
    })
}

fn run_analyze(args: AnalyzeArgs) -> Result<()> {
    let (system, load_notes) =
        load_system(&args.system, args.normalize).map_err(|e| e.at_stage("load"))?;
    let options = AnalysisOptions {
        tol: args.tol,
        skip_estimate: args.skip_estimate,
        structure: structure(&args).map_err(|e| e.at_stage("load"))?,
        normalize: args.normalize,
    };
    let mut report = analyze(&system, &args.optimizer.config(), &options)?;
    report.notes.splice(0..0, load_notes);
    match &args.report {
        Some(path) => {
            emit_report(&report, path)?;
            let t = match report.t_lower {
                TimeBound::Zero => "0".to_string(),
                TimeBound::Certified(t) => format!("{t:.12}"),
                TimeBound::Unknown => "unknown".to_string(),
            };
            println!("report written to {} (T_lower = {t})", path.display());
        }
        None => print!("{}", report.to_json_string()),
    }
    Ok(())
}

fn run_oracle(cmd: OracleCommand) -> Result<()> {
    let doc = match cmd {
        OracleCommand::DetSum {
            k,
            samples,
            grid,
            seed,
        } => {
            let o = det_sum_oracle(k, samples, grid, seed)?;
            json!({
                "k": k,
                "samples": samples,
                "grid": grid,
                "seed": seed,
                "sampled_max": o.sampled_max,
                "grid_max": o.grid_max,
                "interior_value": 2f64.powf(1.0 - k as f64 / 2.0),
                "within_bound": o.sampled_max <= 1.0 + 1e-9 && o.grid_max <= 1.0 + 1e-9,
            })
        }
        OracleCommand::TensorBound {
            samples,
            p,
            q,
            seed,
        } => {
            let max = tensor_bound_oracle(p, q, samples, seed)?;
            json!({
                "p": p,
                "q": q,
                "samples": samples,
                "seed": seed,
                "max_overlap": max,
                "bound": std::f64::consts::FRAC_1_SQRT_2,
                "within_bound": max <= std::f64::consts::FRAC_1_SQRT_2 + 1e-12,
            })
        }
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&doc).expect("serializable")
    );
    Ok(())
}

fn load_vector(path: &Path) -> Result<ComplexVector> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let entries: Vec<ComplexEntry> = serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("cannot parse {}: {e}", path.display())))?;
    ComplexVector::new(entries.iter().map(|e| C64::new(e.re, e.im)).collect())
        .map_err(|e| Error::Input(e.to_string()))
}

fn run_trace(args: TraceArgs) -> Result<()> {
    let (system, _) = load_system(&args.system, args.normalize).map_err(|e| e.at_stage("load"))?;
    let schedule = load_schedule(&args.controls).map_err(|e| e.at_stage("load"))?;
    let x0 = match &args.x0 {
        Some(p) => load_vector(p).map_err(|e| e.at_stage("load"))?,
        None => ComplexVector::basis(system.n(), 0),
    };
    let trace = orbit_distance_trace(
        &system,
        &schedule,
        &x0,
        args.horizon,
        args.samples,
        &args.optimizer.config(),
    )
    .map_err(|e| e.at_stage("trace"))?;
    let violations = trace.iter().filter(|p| !p.within_bound()).count();
    let doc = json!({
        "horizon": args.horizon,
        "tolerance": TRACE_TOL,
        "violations": violations,
        "samples": trace,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&doc).expect("serializable")
    );
    if violations > 0 {
        return Err(Error::Internal(format!(
            "{violations} samples exceed the speed bound d(t) ≤ t + {TRACE_TOL}"
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Oracle(cmd) => run_oracle(cmd),
        Command::Trace(args) => run_trace(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
