//! `subcert`: batch front end for the subelliptic certification toolkit.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use subcert::weight::sampling::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(name = "subcert", version, about = "Subelliptic estimates for systems of complex quadratic forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kernel tower, k0, loss of derivatives and singular spaces.
    Analyze {
        file: String,
        #[arg(long)]
        kmax: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Best constants of the estimate on finite Hermite levels.
    Verify {
        file: String,
        #[arg(long, value_delimiter = ',', default_values_t = subcert::verifier::DEFAULT_LEVELS)]
        levels: Vec<usize>,
        /// Overrides the certified k0.
        #[arg(long)]
        k0: Option<usize>,
        /// Extra weight powers s to scan.
        #[arg(long, value_delimiter = ',')]
        powers: Vec<f64>,
        #[arg(long)]
        kmax: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Sampled constant search for the bounded weights.
    Weights {
        file: String,
        /// Weight level; defaults to the certified k0.
        #[arg(long)]
        m: Option<usize>,
        /// Directions per radius.
        #[arg(long, default_value_t = 128)]
        samples: usize,
        /// Number of log-spaced radii.
        #[arg(long, default_value_t = 24)]
        shells: usize,
        /// Largest sampled radius.
        #[arg(long, default_value_t = 1e3)]
        radius: f64,
        #[arg(long)]
        kmax: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Wick correction and positivity of each form.
    Wick {
        file: String,
        /// Hermite levels; the largest one is used.
        #[arg(long, value_delimiter = ',', default_values_t = [12usize])]
        levels: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Writes a built-in system as JSON.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// For `cross`: emit the single form Σ(λ_j q_j + λ̃_j q̃_j) with these λ_j.
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<f64>,
        /// For `cross`: the λ̃_j (default: equal to `--lambda`).
        #[arg(long, value_delimiter = ',')]
        lambda_tilde: Vec<f64>,
        /// Output file (default: standard output).
        #[arg(long, short)]
        output: Option<String>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Relative rank tolerance.
    #[arg(long, default_value_t = subcert::singular::DEFAULT_RANK_TOL)]
    pub tol: f64,
    /// Include wall-clock timings (makes the report non-reproducible).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    /// The cross system q_j, q̃_j.
    Cross,
    /// ξ² + i x².
    Model,
    /// (1 + i)(|x|² + |ξ|²).
    Elliptic,
    /// x₁² + ξ₁².
    Degenerate,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_SATISFIED: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("SUBCERT_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("SUBCERT_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("SUBCERT_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INPUT);
    }
    let outcome = match cli.command {
        Command::Analyze { file, kmax, common } => commands::analyze(&file, kmax, &common),
        Command::Verify { file, levels, k0, powers, kmax, common } => {
            commands::verify(&file, &levels, k0, &powers, kmax, &common)
        }
        Command::Weights { file, m, samples, shells, radius, kmax, common } => {
            commands::weights(&file, m, samples, shells, radius, kmax, &common)
        }
        Command::Wick { file, levels, common } => commands::wick(&file, &levels, &common),
        Command::Example { name, n, lambda, lambda_tilde, output } => {
            commands::example(name, n, &lambda, &lambda_tilde, output.as_deref())
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                subcert::Error::Numerical(_) => EXIT_NUMERICAL,
                _ => EXIT_INPUT,
            })
        }
    }
}
