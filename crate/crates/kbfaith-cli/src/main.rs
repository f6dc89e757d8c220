//! `kbfaith`: knowledge-base-grounded analysis and correction of entity
//! mentions in abstractive summaries.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags or config), 2 on
//! data errors (unreadable or malformed inputs).

mod commands;
mod settings;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use settings::{CliError, CommonArgs, LinArgs, PredArgs, RevArgs, Settings};

#[derive(Debug, Parser)]
#[command(
    name = "kbfaith",
    version,
    about = "Quantify and repair entity-level faithfulness of summaries against a knowledge base"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print knowledge-base statistics and, with a corpus, mean subgraph size.
    KbStats(CommonArgs),
    /// Report how many target-summary entities the source or KB can support.
    Coverage(CommonArgs),
    /// Keep documents with at least one out-of-source target entity of a category.
    Subset(CommonArgs),
    /// Append linearized subgraph facts (or control baselines) to each source.
    Augment {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        lin: LinArgs,
    },
    /// Mask entity mentions in candidate (or gold) summaries into skeletons.
    Mask(CommonArgs),
    /// Fill skeleton masks from the fact memory built over each source's subgraph.
    Revise {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        rev: RevArgs,
    },
    /// Score predictions (or oracle fills) for entity correctness/consistency and ROUGE-1.
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        rev: RevArgs,
        #[command(flatten)]
        pred: PredArgs,
    },
    /// Run mask, revise, and eval in sequence, writing every artifact.
    Pipeline {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        rev: RevArgs,
    },
}

fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::KbStats(common) => {
            let s = Settings::resolve(common, None, None, None)?;
            commands::cmd_kb_stats(&s)
        }
        Command::Coverage(common) => {
            let s = Settings::resolve(common, None, None, None)?;
            commands::cmd_coverage(&s)
        }
        Command::Subset(common) => {
            let s = Settings::resolve(common, None, None, None)?;
            commands::cmd_subset(&s)
        }
        Command::Augment { common, lin } => {
            let s = Settings::resolve(common, Some(lin), None, None)?;
            commands::cmd_augment(&s)
        }
        Command::Mask(common) => {
            let s = Settings::resolve(common, None, None, None)?;
            commands::cmd_mask(&s)
        }
        Command::Revise { common, rev } => {
            let s = Settings::resolve(common, None, Some(rev), None)?;
            commands::cmd_revise(&s)
        }
        Command::Eval { common, rev, pred } => {
            let s = Settings::resolve(common, None, Some(rev), Some(pred))?;
            commands::cmd_eval(&s)
        }
        Command::Pipeline { common, rev } => {
            let s = Settings::resolve(common, None, Some(rev), None)?;
            commands::cmd_pipeline(&s)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version print to stdout and succeed; anything else
            // is a usage error.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
