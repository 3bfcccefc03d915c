use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mirror_cli::{run, Command, FigureKind, Format, RunConfig};

/// Reports and figures for the mirror Lagrangian cobordism of the Euler
/// sequence on projective space.
#[derive(Parser)]
#[command(name = "euler-mirror", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Dimension of the projective space.
    #[arg(long)]
    n: usize,

    /// Figure to draw (figure command only).
    #[arg(long, value_enum)]
    kind: Option<FigureKind>,

    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = RunConfig {
        command: cli.command,
        n: cli.n,
        kind: cli.kind,
        format: cli.format,
        out: cli.out,
    };
    match run(&config) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
