use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wedgewave::harness::{parse_list, run_to_dir, ExperimentConfig, Family, Overrides};
use wedgewave::Error;

#[derive(Debug, Parser)]
#[command(
    name = "wedgewave",
    version,
    about = "Run one experiment family on a truncated wedge-local model"
)]
struct Cli {
    /// ergodic | clustering | smatrix | deform | warp-oracle | modular-demo
    family: String,
    /// TOML config; missing keys take their defaults.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "wedgewave-out")]
    out: PathBuf,
    /// Replaces `deformation.kappa` by a single value.
    #[arg(long)]
    kappa: Option<f64>,
    /// Comma-separated `|T|` values, replacing `kernel.schedule_t`.
    #[arg(long = "schedule-T")]
    schedule_t: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

const PASS: u8 = 0;
const ASSERTION: u8 = 1;
const CONFIG: u8 = 2;
const NUMERICAL: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::InvalidParameter { .. } | Error::DimensionOverflow { .. } => {
            CONFIG
        }
        Error::NonConvergence(_)
        | Error::QuadratureBudget { .. }
        | Error::ApproximantFailure { .. }
        | Error::PathDisagreement { .. } => NUMERICAL,
        _ => ASSERTION,
    }
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let family: Family = cli.family.parse()?;
    let mut config = ExperimentConfig::load(&cli.config)?;
    let overrides = Overrides {
        kappa: cli.kappa,
        schedule_t: cli.schedule_t.as_deref().map(parse_list).transpose()?,
        seed: cli.seed,
    };
    overrides.apply(&mut config)?;
    let out = run_to_dir(&config, family, &cli.out)?;
    for c in &out.report.checks {
        let mark = if c.pass { "pass" } else { "FAIL" };
        let op = serde_json::to_string(&c.comparison).unwrap_or_default();
        println!(
            "{mark}  {:<40} {:>12.4e} {} {:.4e}",
            c.name,
            c.value,
            op.trim_matches('"'),
            c.bound
        );
    }
    println!("report: {}", cli.out.join("report.json").display());
    Ok(out.report.passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::from(PASS),
        Ok(false) => ExitCode::from(ASSERTION),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
