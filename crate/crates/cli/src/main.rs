//! `vizreq`: batch front door to the requirements pipeline.

mod commands;

use std::num::{NonZeroU32, NonZeroUsize};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vizreq_core::derivation::Weights;
use vizreq_core::model::Skill;
use vizreq_core::profiler::{TypingAnswer, DEFAULT_CARDINALITY_THRESHOLD};

#[derive(Parser, Debug)]
#[command(
    name = "vizreq",
    version,
    about = "Goal-driven visualization requirements and chart recommendation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    /// Structured JSON document.
    Doc,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a goal model and print its diagnostics.
    Validate {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Profile one CSV column.
    Profile {
        csv: PathBuf,
        #[arg(long)]
        column: String,
        /// Whether a text column's values have an order (yes/no), or a forced type.
        #[arg(long)]
        ordinal: Option<TypingAnswer>,
        #[arg(long, default_value_t = DEFAULT_CARDINALITY_THRESHOLD)]
        threshold: NonZeroU32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Walk the goal questions with answers from a file.
    Elicit {
        #[arg(long)]
        actor: String,
        #[arg(long)]
        skill: Skill,
        #[arg(long)]
        strategic: String,
        /// JSON array of answers, in question order.
        #[arg(long)]
        answers: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Recommend charts for every visualization of a model.
    Derive {
        model: PathBuf,
        #[command(flatten)]
        derive: DeriveArgs,
        #[command(flatten)]
        revision: RevisionArgs,
        /// Only these visualizations.
        #[arg(long = "visualization")]
        visualizations: Vec<String>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Print the validation questionnaire of a model.
    Questionnaire {
        model: PathBuf,
        #[command(flatten)]
        revision: RevisionArgs,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Write the dashboard document for a validated model.
    Emit {
        model: PathBuf,
        #[command(flatten)]
        derive: DeriveArgs,
        #[command(flatten)]
        revision: RevisionArgs,
        /// Validation outcome JSON.
        #[arg(long)]
        validation: PathBuf,
        #[arg(long, default_value = "2")]
        columns: NonZeroUsize,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the session service.
    Serve {
        #[arg(long, default_value = "8080")]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Directory holding session logs; in-memory when absent.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, env = "VIZREQ_MATRIX")]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CARDINALITY_THRESHOLD)]
        threshold: NonZeroU32,
        #[arg(long)]
        weights: Option<Weights>,
    },
}

#[derive(Args, Debug)]
pub struct DeriveArgs {
    /// Directory of CSV files, one per collection.
    #[arg(long)]
    pub data: PathBuf,
    /// Suitability matrix JSON; the shipped matrix when absent.
    #[arg(long, env = "VIZREQ_MATRIX")]
    pub matrix: Option<PathBuf>,
    /// Seven comma-separated coordinate weights.
    #[arg(long)]
    pub weights: Option<Weights>,
    /// Column typing answers JSON.
    #[arg(long)]
    pub answers: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CARDINALITY_THRESHOLD)]
    pub threshold: NonZeroU32,
}

#[derive(Args, Debug)]
pub struct RevisionArgs {
    /// Revision patch JSON, applied in order.
    #[arg(long = "patch")]
    pub patches: Vec<PathBuf>,
    /// Visualizations left out.
    #[arg(long = "abandon")]
    pub abandon: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let mut stdout = std::io::stdout().lock();
    match commands::run(cli.command, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint!("{}", e.report());
            ExitCode::from(1)
        }
    }
}
