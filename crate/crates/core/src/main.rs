use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use csr_game::cli::{self, OutputFormat, RunConfig, SweepSpec};

/// Open-loop Stackelberg equilibrium solver for a three-tier supply chain
/// CSR-investment game.
#[derive(Parser)]
#[command(name = "csr-game", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Parameter config file (JSON, snake_case field names).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Output format for data files.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the game by the sweep method and write trajectory + profits.
    Solve(CommonArgs),
    /// Solve by sweep and by the direct stacked system; verify they agree.
    Check(CommonArgs),
    /// Compare equilibrium profits against the no-game baseline.
    Compare(CommonArgs),
    /// Dump derived and printed Hamiltonian-system blocks as JSON.
    Matrices(CommonArgs),
    /// Re-solve over evenly spaced values of one parameter.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Parameter to vary (any config field name).
        #[arg(long)]
        param: String,
        /// First value.
        #[arg(long)]
        from: f64,
        /// Last value.
        #[arg(long)]
        to: f64,
        /// Number of evenly spaced points (>= 2).
        #[arg(long)]
        steps: usize,
    },
}

fn build_config(common: &CommonArgs, sweep: Option<SweepSpec>) -> Result<RunConfig, cli::CmdError> {
    Ok(RunConfig {
        model: cli::load_config(&common.config)?,
        out_dir: common.out.clone(),
        format: common.format,
        sweep,
    })
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let run = || -> Result<(), cli::CmdError> {
        match &args.command {
            Command::Solve(c) => cli::cmd_solve(&build_config(c, None)?),
            Command::Check(c) => cli::cmd_check(&build_config(c, None)?),
            Command::Compare(c) => cli::cmd_compare(&build_config(c, None)?),
            Command::Matrices(c) => cli::cmd_matrices(&build_config(c, None)?),
            Command::Sweep {
                common,
                param,
                from,
                to,
                steps,
            } => cli::cmd_sweep(&build_config(
                common,
                Some(SweepSpec {
                    param: param.clone(),
                    from: *from,
                    to: *to,
                    steps: *steps,
                }),
            )?),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
