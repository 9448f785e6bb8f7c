mod args;
mod commands;
mod input;
mod report;

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Format};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read input: {0}")]
    Input(String),
    #[error("input is not an extended metric: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] ptolemaic::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn emit(path: Option<&std::path::Path>, bytes: &[u8], fallback: &mut dyn Write) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => fallback.write_all(bytes),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let start = Instant::now();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(g.workers as usize).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match pool.install(|| commands::run(&cli.command, g)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut report = outcome.report;
    report.timings.workers = g.workers;
    report.timings.total_s = start.elapsed().as_secs_f64();

    let rendered = match g.format {
        Format::Json => serde_json::to_vec_pretty(&report).map(|mut v| {
            v.push(b'\n');
            v
        }),
        Format::Csv => Ok(report.to_csv().into_bytes()),
    };
    let rendered = match rendered {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &outcome.artifact {
        // Artifact goes to --out (or stdout); the report then takes stdout (or stderr).
        Some(artifact) => emit(g.out.as_deref(), artifact, &mut io::stdout()).and_then(|_| {
            if g.out.is_some() {
                io::stdout().write_all(&rendered)
            } else {
                io::stderr().write_all(&rendered)
            }
        }),
        None => emit(g.out.as_deref(), &rendered, &mut io::stdout()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
