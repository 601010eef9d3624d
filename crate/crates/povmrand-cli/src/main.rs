//! Command-line front end for POVM intrinsic-randomness analysis.
//!
//! Exit codes: 0 success, 1 domain failure (invalid POVM, residual breach,
//! infeasible request), 2 I/O or parse failure. Reports are single JSON
//! objects on stdout; sweeps emit CSV. All randomness is pinned by --seed,
//! and repeated runs with the same arguments produce byte-identical output.

use clap::{Parser, Subcommand, ValueEnum};
use povmrand_cli::commands::{self, CmdError, Mode, RandomnessArgs};
use povmrand::Measure;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "povmrand",
    version,
    about = "Intrinsic randomness of quantum measurement outcomes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Rc,
    Rq,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Measure {
        match m {
            MeasureArg::Rc => Measure::Rc,
            MeasureArg::Rq => Measure::Rq,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Extremal,
    Cf,
}

#[derive(Subcommand)]
enum Command {
    /// Check POVM invariants and report the extremality verdict.
    Validate {
        /// POVM JSON file
        povm: PathBuf,
    },
    /// Intrinsic randomness of a state under a POVM.
    Randomness {
        povm: PathBuf,
        state: PathBuf,
        /// Convex-roof (rc) or conditional-entropy (rq) functional
        #[arg(long, value_enum, default_value = "rc")]
        measure: MeasureArg,
        /// auto dispatches on the extremality verdict
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Minimum randomness over input states (source-independent rate).
    MinRandomness {
        povm: PathBuf,
        #[arg(long, value_enum, default_value = "rc")]
        measure: MeasureArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sweep the depolarized vn/mub/sic families and emit CSV.
    Figure3 {
        #[arg(long = "mu-steps", default_value_t = 5)]
        mu_steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the CSV to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonical Naimark extension with its consistency residual.
    Naimark {
        povm: PathBuf,
        /// Also write the JSON to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose a POVM into a mixture of extremal POVMs.
    Decompose {
        povm: PathBuf,
    },
}

fn run(cli: Cli) -> commands::CmdResult {
    match cli.command {
        Command::Validate { povm } => commands::cmd_validate(&povm),
        Command::Randomness {
            povm,
            state,
            measure,
            mode,
            seed,
            restarts,
        } => commands::cmd_randomness(
            &povm,
            &state,
            &RandomnessArgs {
                measure: measure.into(),
                mode: match mode {
                    ModeArg::Auto => Mode::Auto,
                    ModeArg::Extremal => Mode::Extremal,
                    ModeArg::Cf => Mode::Cf,
                },
                seed,
                restarts,
            },
        ),
        Command::MinRandomness { povm, measure, seed } => {
            commands::cmd_min_randomness(&povm, measure.into(), seed)
        }
        Command::Figure3 { mu_steps, seed, out } => {
            let result = commands::cmd_figure3(mu_steps, seed)?;
            if let Some(path) = out {
                std::fs::write(&path, &result.0)
                    .map_err(|e| CmdError::Io(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(result)
        }
        Command::Naimark { povm, out } => {
            let result = commands::cmd_naimark(&povm)?;
            if let Some(path) = out {
                std::fs::write(&path, &result.0)
                    .map_err(|e| CmdError::Io(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(result)
        }
        Command::Decompose { povm } => commands::cmd_decompose(&povm),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok((output, code)) => {
            if output.ends_with('\n') {
                print!("{output}");
            } else {
                println!("{output}");
            }
            std::process::exit(code);
        }
        Err(CmdError::Domain(obj)) => {
            println!("{}", obj.render());
            std::process::exit(1);
        }
        Err(CmdError::Io(message)) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
    }
}
