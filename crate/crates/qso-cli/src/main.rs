mod args;
mod commands;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use qso_core::quotients::{FiniteModule, Matrices};
use qso_core::Error;

use args::{Cli, Format, OutputArgs};
use commands::Outcome;

const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let outcome = commands::run(&cli.command).and_then(|o| emit(&o, &cli.out).map(|_| o.code));
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qso: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

fn emit(o: &Outcome, out: &OutputArgs) -> Result<(), Error> {
    match out.format {
        Format::Json => {
            let text = match &o.module {
                Some(m) if o.json == m.to_json() => m.to_json_string(),
                _ => serde_json::to_string_pretty(&o.json)
                    .map_err(|e| Error::Parse(e.to_string()))?,
            } + "\n";
            match &out.output {
                Some(p) => write_file(p, &text),
                None => {
                    let _ = std::io::stdout().write_all(text.as_bytes());
                    Ok(())
                }
            }
        }
        Format::Csv => {
            let m = o.module.as_ref().ok_or_else(|| {
                Error::Parse("this command has no matrix output; use --format json".into())
            })?;
            emit_csv(m, out)
        }
    }
}

fn emit_csv(m: &FiniteModule, out: &OutputArgs) -> Result<(), Error> {
    if matches!(m.matrices, Matrices::Symbolic { .. }) {
        return Err(Error::Parse(
            "CSV holds numbers; drop --symbolic or use --format json".into(),
        ));
    }
    match (&out.output, out.r#gen) {
        (None, None) => Err(Error::Parse("--format csv on stdout needs --gen".into())),
        (None, Some(g)) => {
            let _ = std::io::stdout().write_all(m.csv(g)?.as_bytes());
            Ok(())
        }
        (Some(p), Some(g)) => write_file(p, &m.csv(g)?),
        (Some(p), None) => {
            let stem = p.with_extension("");
            for g in 1..m.n {
                let path = format!("{}.B{g}.csv", stem.display());
                write_file(Path::new(&path), &m.csv(g)?)?;
            }
            Ok(())
        }
    }
}
