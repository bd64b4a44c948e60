use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use itemwatch::validation::Suite;
use itemwatch_cli::monitor::{cmd_monitor, MonitorArgs};
use itemwatch_cli::simulate::cmd_simulate;
use itemwatch_cli::validate::cmd_validate;

#[derive(Parser)]
#[command(
    name = "itemwatch",
    version,
    about = "Sequential detection of compromised items in a pool"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation study and write trajectory and quantile tables.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply one administration to a monitor state.
    Monitor {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        batch: PathBuf,
        /// Risk threshold for this run only.
        #[arg(long)]
        alpha: Option<f64>,
        /// Detection table path (default: detections.csv next to the state).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the built-in validation suites.
    Validate {
        #[arg(long, value_enum)]
        suite: SuiteArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Oracles,
    Calibration,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Oracles => Suite::Oracles,
            SuiteArg::Calibration => Suite::Calibration,
            SuiteArg::All => Suite::All,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, out } => cmd_simulate(&config, &out).map(|run| {
            for line in &run.summary {
                println!("{line}");
            }
            println!(
                "wrote {} and {}",
                run.trajectories_path.display(),
                run.quantiles_path.display()
            );
            true
        }),
        Command::Monitor {
            state,
            batch,
            alpha,
            report,
        } => cmd_monitor(&MonitorArgs {
            state,
            batch,
            alpha,
            report,
        })
        .map(|run| {
            println!(
                "t={} items={} detected={} risk={}",
                run.time,
                run.report.scores.len(),
                run.report.outcome.detected.len(),
                run.report.outcome.realized_risk
            );
            println!("wrote {}", run.report_path.display());
            true
        }),
        Command::Validate { suite } => {
            let (table, passed) = cmd_validate(suite.into());
            print!("{table}");
            Ok(passed)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
