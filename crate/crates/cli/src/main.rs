use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ripe::commands::{self, EvalArgs, ExperimentArgs, FitArgs, PredictArgs};
use ripe::experiment::ExperimentKind;
use ripe_core::{MiningParams, SignificanceSpec, ZKind};

#[derive(Parser)]
#[command(
    name = "ripe",
    version,
    about = "Deterministic, interpretable rule-based regression"
)]
struct Cli {
    /// Worker threads for fitting (0 = automatic). Falls back to the
    /// RIPE_THREADS environment variable.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ZChoice {
    Hoeffding,
    Bernstein,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindChoice {
    Circle,
    Linear,
}

#[derive(clap::Args)]
struct MiningFlags {
    /// Number of discretization classes per feature.
    #[arg(long = "mn", default_value_t = 5)]
    m_n: u16,

    /// False rejection rate of the significance test.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,

    /// Significance threshold family.
    #[arg(long = "z", value_enum, default_value_t = ZChoice::Bernstein)]
    z_kind: ZChoice,

    /// Beam width: rules of each complexity fed to the intersection stage.
    #[arg(long = "max-rules-beam", default_value_t = 300)]
    beam_width: usize,

    /// Cap on rule complexity (default: the number of features).
    #[arg(long)]
    max_complexity: Option<usize>,
}

impl MiningFlags {
    fn to_params(&self) -> Result<MiningParams, ripe::CliError> {
        let kind = match self.z_kind {
            ZChoice::Hoeffding => ZKind::Hoeffding,
            ZChoice::Bernstein => ZKind::Bernstein,
        };
        let significance = SignificanceSpec::new(kind, self.alpha)
            .map_err(|e| ripe::CliError::Input(e.to_string()))?;
        Ok(MiningParams {
            m_n: self.m_n,
            significance,
            beam_width: self.beam_width,
            max_complexity: self.max_complexity,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit a rule model on a CSV file and write it as JSON.
    Fit {
        /// Training data (CSV with a header row; all non-target columns are
        /// numeric features).
        #[arg(long)]
        data: PathBuf,

        /// Name of the target column.
        #[arg(long)]
        target: String,

        #[command(flatten)]
        mining: MiningFlags,

        /// Predict the training global mean instead of 0 for cells never
        /// seen in training.
        #[arg(long)]
        fallback_mean: bool,

        /// Re-screen the selected rules with the variance-based threshold
        /// and print the audit.
        #[arg(long)]
        variance_audit: bool,

        /// Output model file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict a CSV file with a fitted model.
    Predict {
        #[arg(long)]
        model: PathBuf,

        #[arg(long)]
        data: PathBuf,

        /// Output CSV (one prediction per input row).
        #[arg(long)]
        out: PathBuf,

        /// Add a column listing activated rule labels per row.
        #[arg(long)]
        explain: bool,
    },
    /// Evaluate a fitted model: MSE and normalized MSE against a target
    /// column.
    Eval {
        #[arg(long)]
        model: PathBuf,

        #[arg(long)]
        data: PathBuf,

        #[arg(long)]
        target: String,
    },
    /// Run a seeded synthetic experiment and emit metrics.csv, rules.csv,
    /// and (for circle) grid.csv.
    Experiment {
        #[arg(long, value_enum)]
        kind: KindChoice,

        /// Sample size (default: 5000 circle, 500 linear).
        #[arg(long)]
        n: Option<usize>,

        /// Feature count (default: 10 circle, 50 linear).
        #[arg(long)]
        d: Option<usize>,

        /// Informative feature count, linear only (default 3).
        #[arg(long)]
        p: Option<usize>,

        /// Target noise scale, linear only (default 10).
        #[arg(long)]
        noise_sd: Option<f64>,

        #[arg(long, default_value_t = 42)]
        seed: u64,

        #[arg(long, default_value_t = 0.6)]
        train_fraction: f64,

        #[command(flatten)]
        mining: MiningFlags,

        /// Directory for the output CSV files.
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
    },
}

fn configure_threads(flag: Option<usize>) {
    let from_env = || {
        std::env::var("RIPE_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
    };
    let threads = flag.or_else(from_env).unwrap_or(0);
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            log::warn!("could not configure {threads} threads: {e}");
        }
    }
}

fn run(cli: Cli) -> Result<(), ripe::CliError> {
    configure_threads(cli.threads);
    match cli.command {
        Command::Fit {
            data,
            target,
            mining,
            fallback_mean,
            variance_audit,
            out,
        } => commands::fit(&FitArgs {
            data,
            target,
            out,
            params: mining.to_params()?,
            fallback_mean,
            variance_audit,
        }),
        Command::Predict {
            model,
            data,
            out,
            explain,
        } => commands::predict(&PredictArgs {
            model,
            data,
            out,
            explain,
        }),
        Command::Eval {
            model,
            data,
            target,
        } => commands::eval(&EvalArgs {
            model,
            data,
            target,
        }),
        Command::Experiment {
            kind,
            n,
            d,
            p,
            noise_sd,
            seed,
            train_fraction,
            mining,
            outdir,
        } => commands::experiment(&ExperimentArgs {
            kind: match kind {
                KindChoice::Circle => ExperimentKind::Circle,
                KindChoice::Linear => ExperimentKind::Linear,
            },
            n,
            d,
            p,
            noise_sd,
            seed,
            train_fraction,
            outdir,
            params: mining.to_params()?,
        }),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
