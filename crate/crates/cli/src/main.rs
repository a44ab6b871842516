use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flagfiber_cli::commands::{self, GeodesicMetric, NormFamily, Output, RunConfig};
use flagfiber_cli::CliError;

#[derive(Parser)]
#[command(name = "flagfiber", version, about = "Geometry of the flag-fiber bundle over the Grassmannian")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scales every tolerance; 1e-10 keeps the nominal ones.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig { dim: self.dim, samples: self.samples, seed: self.seed, tol: self.tol }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Finsler,
    Quotient,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Random,
    G,
    Y1,
}

#[derive(Subcommand)]
enum Command {
    /// Run every invariant suite and print a JSON report.
    Verify(RunArgs),
    /// Minimal lifting of a tangent vector.
    Lift { point: PathBuf, vector: PathBuf },
    /// Sample a geodesic as CSV.
    Geodesic {
        point: PathBuf,
        vector: PathBuf,
        #[arg(long, value_enum, default_value = "quotient")]
        metric: MetricArg,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 16)]
        steps: usize,
    },
    /// Horizontal lift of the Riemannian logarithm.
    Logmap { from: PathBuf, to: PathBuf },
    /// Quotient and ambient norms of random tangent vectors.
    Norms {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value = "random")]
        family: FamilyArg,
    },
    /// Sectional curvatures of random planes.
    Curvature(RunArgs),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("FLAGFIBER_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Config(format!("FLAGFIBER_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn dispatch(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Verify(run) => commands::verify(&run.config()),
        Command::Lift { point, vector } => commands::lift(&point, &vector),
        Command::Geodesic { point, vector, metric, t, steps } => {
            let metric = match metric {
                MetricArg::Finsler => GeodesicMetric::Finsler,
                MetricArg::Quotient => GeodesicMetric::Quotient,
            };
            commands::geodesic(&point, &vector, metric, t, steps)
        }
        Command::Logmap { from, to } => commands::logmap(&from, &to),
        Command::Norms { run, family } => {
            let family = match family {
                FamilyArg::Random => NormFamily::Random,
                FamilyArg::G => NormFamily::G,
                FamilyArg::Y1 => NormFamily::Y1,
            };
            commands::norms(&run.config(), family)
        }
        Command::Curvature(run) => commands::curvature(&run.config()),
    }
}

fn write_output(out: Option<&PathBuf>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| CliError::Output(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    configure_threads()?;
    let output = dispatch(cli.command)?;
    write_output(cli.out.as_ref(), &output.body)?;
    if let Some(note) = output.note {
        eprintln!("{note}");
    }
    Ok(output.exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors.
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
