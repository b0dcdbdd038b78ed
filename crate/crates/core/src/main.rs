use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use skipfree::cli::{self, Report};
use skipfree::montecarlo::{SimulationConfig, DEFAULT_ESCAPE_TOLERANCE, DEFAULT_HORIZON};

/// Hitting and parity probabilities for left-continuous random walks.
#[derive(Parser)]
#[command(name = "skipfree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed forms, chain matrices and series brackets.
    Analyze {
        #[command(flatten)]
        input: Input,
    },
    /// Monte Carlo estimates.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sim: Sim<1_000_000>,
    },
    /// Analytic values against series brackets and Monte Carlo; exits 4 on disagreement.
    Compare {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sim: Sim<100_000>,
        /// Also write the comparison table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Reproduces the published worked examples.
    PaperExamples {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    /// Distribution spec (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Start levels, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    k: Vec<u64>,
    /// Write the JSON report here and print a table instead.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Sim<const TRIALS: u64> {
    #[arg(long, default_value_t = TRIALS)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker partitions; does not change results.
    #[arg(long, default_value_t = 1)]
    streams: usize,
}

impl<const N: u64> Sim<N> {
    fn config(&self) -> SimulationConfig {
        SimulationConfig {
            trials: self.trials,
            horizon: self.horizon,
            seed: self.seed,
            streams: self.streams,
            escape_tolerance: DEFAULT_ESCAPE_TOLERANCE,
        }
    }
}

fn emit(report: &Report, out: Option<&PathBuf>) -> skipfree::Result<()> {
    match out {
        Some(path) => {
            report.write(path)?;
            print!("{}", cli::render_table(report));
        }
        None => {
            print!("{}", report.to_json()?);
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
        }
    }
    Ok(())
}

fn run(command: Command) -> skipfree::Result<u8> {
    let (report, out) = match command {
        Command::Analyze { input } => (cli::cmd_analyze(&input.spec, &input.k)?, input.out),
        Command::Simulate { input, sim } => (cli::cmd_simulate(&input.spec, &input.k, &sim.config())?, input.out),
        Command::Compare { input, sim, csv } => {
            let report = cli::cmd_compare(&input.spec, &input.k, &sim.config())?;
            if let Some(path) = csv {
                std::fs::write(&path, cli::render_csv(&report))
                    .map_err(|e| skipfree::Error::Io(format!("{}: {e}", path.display())))?;
            }
            (report, input.out)
        }
        Command::PaperExamples { out } => (cli::cmd_paper_examples()?, out),
    };
    emit(&report, out.as_ref())?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(args.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code_for(&e))
        }
    }
}
