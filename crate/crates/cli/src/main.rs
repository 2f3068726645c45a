use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

mod commands;
mod config;
mod error;
mod report;

use config::{FamilyConfig, RunConfig};
use error::CliError;
use report::Run;

/// Julia sets, pressure and dimension estimates for rational semigroups.
#[derive(Parser)]
#[command(name = "juliadim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; all cores by default.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Render the Julia set to a PNG.
    Render,
    /// Bowen root, box-counting slope and Poincaré critical exponent.
    Dimension,
    /// Atomic conformal measure, geometric ratios and conformality residual.
    Measure,
    /// Open set condition and semi-hyperbolicity checks.
    Check,
    /// Threshold c0 of the perturbation family.
    FamilyC0 {
        #[arg(long)]
        d1: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        r: Option<f64>,
    },
    /// Print the built-in example catalog as JSON.
    ListExamples,
}

fn load_config(cli: &Cli) -> Result<Option<RunConfig>, CliError> {
    let Some(path) = &cli.config else { return Ok(None) };
    let mut cfg = config::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(Some(cfg))
}

fn print_json(v: &Value) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(v)?) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Schema("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Schema(e.to_string()))?;
    }
    let cfg = load_config(&cli)?;
    let (name, mut cfg) = match &cli.command {
        Command::ListExamples => {
            print_json(&commands::list_examples())?;
            return Ok(());
        }
        Command::FamilyC0 { d1, d, r } => {
            let block = cfg.as_ref().and_then(|c| c.family_c0);
            let missing = |what: &str| CliError::Schema(format!("family-c0 needs {what}"));
            let fc = FamilyConfig {
                d1: d1.or(block.map(|b| b.d1)).ok_or_else(|| missing("--d1"))?,
                d: d.or(block.map(|b| b.d)).ok_or_else(|| missing("--d"))?,
                r: r.or(block.map(|b| b.r)).ok_or_else(|| missing("--r"))?,
            };
            let mut run = Run::new(&cli.out);
            let v = commands::family(fc, &mut run)?;
            print_json(&v)?;
            let cfg = cfg.map(|mut c| {
                c.family_c0 = Some(fc);
                c
            });
            return run.finish("family-c0", cfg, v, None);
        }
        Command::Render => ("render", cfg),
        Command::Dimension => ("dimension", cfg),
        Command::Measure => ("measure", cfg),
        Command::Check => ("check", cfg),
    };
    let cfg = cfg.as_mut().ok_or_else(|| CliError::Schema(format!("{name} needs --config")))?;
    let mut run = Run::new(&cli.out);
    let result = match name {
        "render" => commands::render(cfg, &mut run),
        "dimension" => commands::dimension(cfg, &mut run),
        "measure" => commands::measure(cfg, &mut run),
        _ => commands::check(cfg, &mut run),
    };
    match result {
        Ok(v) => run.finish(name, Some(cfg.clone()), v, None),
        // schema errors leave no output behind
        Err(e @ CliError::Schema(_)) => Err(e),
        Err(e) => {
            run.finish(name, Some(cfg.clone()), Value::Null, Some(&e))?;
            Err(e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("juliadim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
