use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use fsl_core::families::FamilyId;
use fsl_core::harness::acceptance::{run_acceptance, AcceptanceOptions};
use fsl_core::harness::io::{write_classification_csv, write_sweep_files, ConfigFile};
use fsl_core::harness::{
    classify_grid, classify_point, run_sweep_with, verify_sweep, SweepConfig, Verdict,
};
use fsl_core::model::{Exponent, ExponentPair};
use fsl_core::transform::TransformMethod;
use fsl_core::Execution;

const EXIT_ERROR: u8 = 1;
const EXIT_FAIL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "fsl",
    version,
    about = "Fourier restriction counterexample sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one family over a parameter sweep and fit the ratio exponent.
    Sweep(SweepArgs),
    /// Classify exponent pairs (1/p, 1/q).
    Classify(ClassifyArgs),
    /// Run the built-in acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config; flags given on the command line override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_family)]
    family: Option<FamilyId>,
    #[arg(long)]
    d: Option<usize>,
    /// Lebesgue exponent of the input norm, `inf` allowed.
    #[arg(long, value_parser = parse_exponent)]
    p: Option<Exponent>,
    /// Lebesgue exponent of the transform norm, `inf` allowed.
    #[arg(long, value_parser = parse_exponent)]
    q: Option<Exponent>,
    /// Comma-separated N values (λ values for family S).
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<f64>>,
    #[arg(long)]
    delta: Option<f64>,
    /// closed | quad | fast
    #[arg(long, value_parser = parse_method)]
    method: Option<TransformMethod>,
    /// Maximum nodes per grid; FSL_BUDGET_NODES takes precedence.
    #[arg(long)]
    grid_budget: Option<u64>,
    /// Output directory for the CSV and JSON sidecar.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Slope tolerance; defaults to 0.15 for closed forms and 0.25 otherwise.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Disable data parallelism.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ClassifyTarget {
    /// Lattice step in the unit square of (1/p, 1/q).
    #[arg(long)]
    grid: Option<f64>,
    /// A single point `1/p,1/q`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    point: Option<Vec<f64>>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    target: ClassifyTarget,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    quick: bool,
    /// Corrupt a slope fixture; the suite must then fail.
    #[arg(long, hide = true)]
    tamper: bool,
}

fn parse_family(s: &str) -> Result<FamilyId, String> {
    s.parse().map_err(|e: fsl_core::Error| e.to_string())
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse().map_err(|e: fsl_core::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<TransformMethod, String> {
    s.parse().map_err(|e: fsl_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig> {
    let mut file = match &a.config {
        Some(path) => {
            ConfigFile::load(path).with_context(|| format!("reading config {}", path.display()))?
        }
        None => {
            let (Some(family), Some(p), Some(q)) = (a.family, a.p, a.q) else {
                bail!("--family, --p and --q are required without --config");
            };
            ConfigFile {
                family,
                d: a.d.unwrap_or(1),
                p,
                q,
                delta: None,
                sweep: None,
                method: None,
                grid_budget: None,
                out: None,
                grid_policy: None,
            }
        }
    };
    if let Some(f) = a.family {
        file.family = f;
    }
    if let Some(d) = a.d {
        file.d = d;
    }
    if let Some(p) = a.p {
        file.p = p;
    }
    if let Some(q) = a.q {
        file.q = q;
    }
    if a.delta.is_some() {
        file.delta = a.delta;
    }
    if a.sweep.is_some() {
        file.sweep = a.sweep.clone();
    }
    if a.method.is_some() {
        file.method = a.method;
    }
    if a.grid_budget.is_some() {
        file.grid_budget = a.grid_budget;
    }
    if a.out.is_some() {
        file.out = a.out.clone();
    }
    Ok(file.into_config()?)
}

fn cmd_sweep(a: SweepArgs) -> Result<bool> {
    let cfg = sweep_config(&a)?;
    let exec = if a.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let result = run_sweep_with(&cfg, exec)?;
    let tol = a.tolerance.unwrap_or_else(|| cfg.tolerance());
    let outcome = verify_sweep(&result, tol);

    let label = if cfg.family == FamilyId::S {
        "1/λ"
    } else {
        "N"
    };
    println!(
        "family {} d={} p={} q={} method={}",
        cfg.family, cfg.d, cfg.pq.p, cfg.pq.q, cfg.method
    );
    println!(
        "{label:>10} {:>14} {:>14} {:>14}",
        "‖f‖_p", "‖Ff‖_q", "ratio"
    );
    for r in &result.rows {
        println!(
            "{:>10} {:>14.6e} {:>14.6e} {:>14.6e}",
            r.n, r.norm_f_p, r.norm_ff_q, r.ratio
        );
    }
    println!(
        "fitted slope {:.4} ± {:.4}, predicted {:.4}",
        result.fitted_slope, result.slope_stderr, result.predicted_slope
    );
    println!("{}: {}", outcome.verdict, outcome.detail);

    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    let (csv, json) = write_sweep_files(&result, outcome.verdict, &dir)?;
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(outcome.verdict == Verdict::Pass)
}

fn cmd_classify(a: ClassifyArgs) -> Result<bool> {
    let rows = match (a.target.grid, a.target.point) {
        (Some(step), _) => classify_grid(step)?,
        (None, Some(pt)) => {
            let [ip, iq] = pt[..] else {
                bail!("--point takes two values `1/p,1/q`, got {}", pt.len());
            };
            vec![classify_point(ExponentPair::from_inv(ip, iq)?)]
        }
        (None, None) => unreachable!("clap requires one of --grid, --point"),
    };
    match a.out {
        Some(path) => {
            let f = std::fs::File::create(&path)
                .with_context(|| format!("creating {}", path.display()))?;
            write_classification_csv(&rows, f)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_classification_csv(&rows, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(true)
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    let opts = AcceptanceOptions {
        quick: a.quick,
        tamper: a.tamper,
    };
    let outcomes = run_acceptance(&opts);
    for o in &outcomes {
        println!("{o}");
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} checks passed", outcomes.len());
    Ok(passed == outcomes.len())
}
