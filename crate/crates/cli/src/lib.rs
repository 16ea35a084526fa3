//! Front end for `qso-core`: flag parsing, command execution and report
//! rendering. The `qso-dyn` binary is a thin wrapper around [`run::run`].

pub mod config;
pub mod run;

pub use config::{Command, RunConfig, X0};
pub use run::{run, Exit, Outcome, ReportEnvelope};
