use clap::{Args, Parser, Subcommand, ValueEnum};
use nlslab_cli::commands::{self, OutputFormat, RunOverrides};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "nlslab",
    version,
    about = "Collapse-criterion laboratory for the 1D nonlinear Schrödinger equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Both => OutputFormat::Both,
        }
    }
}

#[derive(Args)]
struct OverrideArgs {
    /// Override the scenario time step
    #[arg(long)]
    dt: Option<f64>,
    /// Override the scenario end time (negative runs backward)
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Override the gradient-norm detection threshold
    #[arg(long)]
    threshold: Option<f64>,
}

impl From<&OverrideArgs> for RunOverrides {
    fn from(a: &OverrideArgs) -> Self {
        RunOverrides { dt: a.dt, t_end: a.t_end, threshold: a.threshold }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every collapse criterion for a scenario and compare them
    Criteria {
        scenario: PathBuf,
        /// Output directory for verdicts.json (default: NLSLAB_OUT if set)
        #[arg(long, env = "NLSLAB_OUT")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "both")]
        format: Format,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Integrate a scenario; writes records.csv and manifest.json
    Simulate {
        scenario: PathBuf,
        /// Output directory (default: NLSLAB_OUT or ./out)
        #[arg(long, env = "NLSLAB_OUT", default_value = "out")]
        out: PathBuf,
        /// Two-column `re im` sample file replacing the Gaussian initial
        /// state; must match grid.n
        #[arg(long)]
        raw_ic: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "both")]
        format: Format,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run the invariant battery against a scenario (exit 0 iff all pass)
    Verify {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Evaluate the criteria over a parameter grid; writes sweep.csv
    Sweep {
        sweep: PathBuf,
        /// Output directory (default: NLSLAB_OUT, then the sweep file's
        /// out_dir, then ./out)
        #[arg(long, env = "NLSLAB_OUT")]
        out: Option<PathBuf>,
        /// Concurrent evaluation workers; the output is identical for any
        /// worker count
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Criteria { scenario, out, format, overrides } => commands::cmd_criteria(
            scenario,
            out.as_deref(),
            (*format).into(),
            &overrides.into(),
        ),
        Command::Simulate { scenario, out, raw_ic, format, overrides } => commands::cmd_simulate(
            scenario,
            out,
            raw_ic.as_deref(),
            (*format).into(),
            &overrides.into(),
        ),
        Command::Verify { scenario, overrides } => commands::cmd_verify(scenario, &overrides.into()),
        Command::Sweep { sweep, out, workers } => {
            commands::cmd_sweep(sweep, out.as_deref(), *workers)
        }
    };
    std::process::exit(code);
}
