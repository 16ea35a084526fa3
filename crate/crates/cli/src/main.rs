use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use qso_dyn::{run, Exit, RunConfig};

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Exit::Config as u8),
            };
        }
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("qso-dyn: {}", f.message);
            return ExitCode::from(f.code as u8);
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &outcome.output),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&outcome.output).and_then(|_| out.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("qso-dyn: cannot write output: {e}");
        return ExitCode::from(Exit::Io as u8);
    }
    ExitCode::from(outcome.code as u8)
}
