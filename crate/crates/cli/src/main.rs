mod args;
mod commands;
mod format;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Format};
use commands::Output;

/// Exit codes: 0 success, 1 usage, 2 domain error, 3 verification failure.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(weylsys::Error),
    Io(io::Error),
}

impl From<weylsys::Error> for CliError {
    fn from(e: weylsys::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_domain_error() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

fn write_output(out: &Output, format: Format, w: impl Write) -> Result<(), CliError> {
    let mut w = BufWriter::new(w);
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &out.json).map_err(io::Error::from)?;
            writeln!(w)?;
        }
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut w);
            c.write_record(&out.header).map_err(io::Error::from)?;
            for row in &out.rows {
                c.write_record(row).map_err(io::Error::from)?;
            }
            c.flush()?;
        }
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = commands::run(&cli.global, &cli.command).and_then(|out| {
        match &cli.global.out {
            Some(path) => write_output(&out, cli.global.format, File::create(path)?)?,
            None => write_output(&out, cli.global.format, io::stdout().lock())?,
        }
        Ok(out)
    });
    match result {
        Ok(out) => {
            for note in &out.notes {
                eprintln!("{note}");
            }
            if out.failed_verification {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
