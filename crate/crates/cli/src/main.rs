use std::path::PathBuf;
use std::process::ExitCode;

use blockplan_cli::commands::{
    cmd_decompose, cmd_export_dot, cmd_instructions, cmd_oracle_check, cmd_validate, DirSelection,
    PlanFormat,
};
use clap::{Parser, Subcommand, ValueEnum};

/// Decompose direction-labeled block models and generate assembly plans.
#[derive(Parser)]
#[command(name = "blockplan", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and report ingestion diagnostics.
    Validate { path: PathBuf },
    /// Print the maximal feasible decomposition along one or all directions.
    Decompose {
        path: PathBuf,
        /// Direction index to decompose along.
        #[arg(long, conflicts_with = "all_dirs")]
        dir: Option<usize>,
        /// Decompose along every direction (default when --dir is absent).
        #[arg(long)]
        all_dirs: bool,
    },
    /// Generate the step-by-step assembly plan.
    Instructions {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Emit a graphviz dot description of the model, a projection, a CCG,
    /// or the decomposition tree.
    ExportDot {
        path: PathBuf,
        /// One of: model, projection:N, ccg:N, tree.
        #[arg(long)]
        what: String,
    },
    /// Cross-check the fast decomposition against the brute-force oracle.
    OracleCheck {
        path: PathBuf,
        /// Block-count guard for the exponential search.
        #[arg(long, default_value_t = 12)]
        max_blocks: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Decompose { path, dir, .. } => {
            let selection = match dir {
                Some(i) => DirSelection::One(i),
                None => DirSelection::All,
            };
            cmd_decompose(&path, selection)
        }
        Command::Instructions { path, format } => {
            let format = match format {
                Format::Text => PlanFormat::Text,
                Format::Structured => PlanFormat::Structured,
            };
            cmd_instructions(&path, format)
        }
        Command::ExportDot { path, what } => cmd_export_dot(&path, &what),
        Command::OracleCheck { path, max_blocks } => cmd_oracle_check(&path, max_blocks),
    };
    match result {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}", err.message());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
