//! Reports and figures for the mirror of the Euler sequence on `ℙⁿ`.
//!
//! [`run`] executes one [`RunConfig`]: it builds the requested report or
//! figure, writes it to the output path (or stdout) and returns the exit
//! status. Verification verdicts are taken verbatim from `mirror-core`.

pub mod figure;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use thiserror::Error;

pub use figure::{FigureKind, FigureSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Info,
    Divisors,
    Cotangent,
    EulerCobordism,
    Mutate,
    Figure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Svg,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub kind: Option<FigureKind>,
    /// Defaults to `svg` for figures and `json` otherwise.
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// The emitted text and the verdict of the underlying check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub body: String,
    pub pass: bool,
}

impl RunConfig {
    pub fn new(command: Command, n: usize) -> Self {
        RunConfig {
            command,
            n,
            kind: None,
            format: None,
            out: None,
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(match self.command {
            Command::Figure => Format::Svg,
            _ => Format::Json,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.n == 0 {
            return usage("--n must be at least 1".into());
        }
        match (self.command, self.format()) {
            (Command::Figure, Format::Svg) => {}
            (Command::Figure, f) => return usage(format!("figure only supports --format svg, not {f:?}")),
            (_, Format::Svg) => return usage("--format svg is only valid for the figure command".into()),
            _ => {}
        }
        match (self.command, self.kind) {
            (Command::Figure, None) => usage("figure needs --kind".into()),
            (Command::Figure, Some(kind)) if !kind.supports(self.n) => {
                usage(format!("figure kind {} does not support n = {}", kind.name(), self.n))
            }
            (Command::Figure, Some(_)) => Ok(()),
            (_, Some(_)) => usage("--kind is only valid for the figure command".into()),
            (_, None) => Ok(()),
        }
    }
}

/// Builds the artifact for `config` without writing it anywhere.
pub fn render(config: &RunConfig) -> Result<Artifact, CliError> {
    config.validate()?;
    if config.command == Command::Figure {
        let spec = FigureSpec::new(config.kind.expect("validated"));
        let body = figure::emit_figure(&spec, config.n)?;
        return Ok(Artifact { body, pass: true });
    }
    let report = report::build(config.command, config.n)?;
    let body = match config.format() {
        Format::Text => report.to_text(),
        _ => report.to_json(),
    };
    Ok(Artifact {
        body,
        pass: report.pass(),
    })
}

/// Renders and writes the artifact; returns the exit status (0 or 1).
pub fn run(config: &RunConfig) -> Result<i32, CliError> {
    let artifact = render(config)?;
    match &config.out {
        Some(path) => std::fs::write(path, &artifact.body).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => std::io::stdout()
            .write_all(artifact.body.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })?,
    }
    Ok(if artifact.pass { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors() {
        let mut c = RunConfig::new(Command::Info, 0);
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
        c.n = 2;
        c.format = Some(Format::Svg);
        assert!(matches!(c.validate(), Err(CliError::Usage(_))));
        let mut f = RunConfig::new(Command::Figure, 1);
        assert!(matches!(f.validate(), Err(CliError::Usage(_))));
        f.kind = Some(FigureKind::CoverSurgery);
        assert!(f.validate().is_ok());
        f.n = 2;
        assert!(matches!(f.validate(), Err(CliError::Usage(_))));
        f.kind = Some(FigureKind::PolytopeWeights);
        assert!(f.validate().is_ok());
        f.n = 3;
        assert!(matches!(f.validate(), Err(CliError::Usage(_))));
        f.n = 2;
        f.format = Some(Format::Json);
        assert!(matches!(f.validate(), Err(CliError::Usage(_))));
        let mut k = RunConfig::new(Command::Mutate, 2);
        k.kind = Some(FigureKind::AnnulusCurves);
        assert!(matches!(k.validate(), Err(CliError::Usage(_))));
    }

    #[test]
    fn verdicts_come_from_the_library() {
        let a = render(&RunConfig::new(Command::EulerCobordism, 2)).unwrap();
        assert!(a.pass);
        let lib = mirror_core::tropical::verify_main_theorem(2).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&a.body).unwrap();
        assert_eq!(parsed["pass"], serde_json::Value::Bool(lib.pass));
    }
}
