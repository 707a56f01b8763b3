use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wongspin::commands::{self, AssertOptions, CommandOutcome, DEFAULT_DRIFT_TOL};

/// Batch runs of the spinning colored particle equations of motion.
///
/// Exit codes: 0 success, 1 i/o error, 2 invalid configuration, 3 numerical
/// blowup, 4 invariant or check threshold exceeded.
#[derive(Parser)]
#[command(name = "wongspin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct AssertArgs {
    /// Fail with exit code 4 when a conserved quantity drifts past --drift-tol.
    #[arg(long)]
    assert_invariants: bool,
    /// Allowed drift, relative for values above one and absolute below.
    #[arg(long, default_value_t = DEFAULT_DRIFT_TOL)]
    drift_tol: f64,
}

impl AssertArgs {
    fn options(&self) -> AssertOptions {
        AssertOptions {
            assert_invariants: self.assert_invariants,
            drift_tol: self.drift_tol,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and write CSV, drift report and manifest.
    Simulate {
        config: PathBuf,
        #[command(flatten)]
        assert: AssertArgs,
    },
    /// Bianchi identity and covariant-derivative cross-checks of a field config.
    CheckField { config: PathBuf },
    /// Jacobi and commutator residuals of a builtin algebra or a JSON file.
    CheckAlgebra { algebra: String },
    /// Matrix-level checks of the quantized theory.
    QuantizeCheck { config: PathBuf },
    /// Run the Cartesian product of a parameter grid.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        assert: AssertArgs,
    },
    /// Dispatch on the `mode` entry of the config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        assert: AssertArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = commands::guard(|| match &cli.command {
        Command::Simulate { config, assert } => {
            commands::simulate(&commands::read_config(config)?, &assert.options())
        }
        Command::CheckField { config } => commands::check_field(&commands::read_config(config)?),
        Command::CheckAlgebra { algebra } => commands::check_algebra(algebra),
        Command::QuantizeCheck { config } => {
            commands::quantize_check(&commands::read_config(config)?)
        }
        Command::Sweep { config, assert } => {
            commands::sweep(&commands::read_config(config)?, &assert.options())
        }
        Command::Run { config, assert } => {
            commands::run(&commands::read_config(config)?, &assert.options())
        }
    });
    report(&outcome);
    ExitCode::from(outcome.exit_code as u8)
}

fn report(outcome: &CommandOutcome) {
    if !outcome.report.is_null() {
        let text =
            serde_json::to_string_pretty(&outcome.report).expect("JSON values always serialize");
        // A closed pipe on stdout is not worth a panic.
        let _ = writeln!(std::io::stdout().lock(), "{text}");
    }
    if let Some(msg) = &outcome.message {
        eprintln!("wongspin: {msg}");
    }
}
