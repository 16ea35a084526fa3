//! Run configuration: every input of a run is a flag, so a config can be
//! echoed into its report and replayed from it.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use qso_core::instances::seeded_point;
use qso_core::{make_point, OperatorSpec, QsoError, SimplexPoint};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Write the orbit of x0 as CSV.
    Simulate,
    /// Classify the limit set of the orbit of x0.
    Classify,
    /// List fixed points with their stability.
    Fixpoints,
    /// Cesàro averages along a doubling schedule.
    Ergodic,
    /// Run the seeded property suites.
    Verify,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Classify => "classify",
            Self::Fixpoints => "fixpoints",
            Self::Ergodic => "ergodic",
            Self::Verify => "verify",
        }
    }
}

/// Starting point: an explicit list, the barycenter, or a seeded uniform draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum X0 {
    Uniform,
    Random,
    List(Vec<f64>),
}

impl FromStr for X0 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "uniform" => Ok(Self::Uniform),
            "random" => Ok(Self::Random),
            list => list
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad coordinate {v:?}")))
                .collect::<Result<Vec<_>, _>>()
                .map(Self::List),
        }
    }
}

impl fmt::Display for X0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => f.write_str("uniform"),
            Self::Random => f.write_str("random"),
            Self::List(v) => {
                // `{}` on f64 prints the shortest string that parses back exactly
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl From<X0> for String {
    fn from(x: X0) -> String {
        x.to_string()
    }
}

impl TryFrom<String> for X0 {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "qso-dyn", version, about = "Dynamics of permutation quadratic stochastic operators")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Dimension of the simplex (number of coordinates).
    #[arg(long)]
    pub m: Option<usize>,
    /// Permutation of 1..m-1: "Id", cycles "(1 2)(3 4)" or images "2,1,4,3".
    #[arg(long, default_value = "Id")]
    pub perm: String,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Comma-separated coordinates, "uniform" or "random".
    #[arg(long, default_value = "uniform")]
    pub x0: X0,
    #[arg(long, default_value_t = 100_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of sampled points of X (fixpoints).
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Comma-separated property names (verify; all when absent).
    #[arg(long, value_delimiter = ',')]
    pub properties: Vec<String>,
    /// Random instances per property (verify).
    #[arg(long, default_value_t = 50)]
    pub instances: usize,
    /// Corrupt the tensor fixture so the tensor-validation suite fails (verify).
    #[arg(long)]
    pub inject_fault: bool,
    /// Record wall time in the report; the output is then no longer reproducible.
    #[arg(long)]
    pub timing: bool,
}

impl RunConfig {
    /// Flags that parse back to `self`.
    pub fn to_args(&self) -> Vec<String> {
        let mut a = vec![
            "qso-dyn".to_string(),
            self.command.as_str().to_string(),
        ];
        let mut flag = |name: &str, value: String| {
            a.push(format!("--{name}"));
            a.push(value);
        };
        if let Some(m) = self.m {
            flag("m", m.to_string());
        }
        flag("perm", self.perm.clone());
        flag("alpha", self.alpha.to_string());
        flag("x0", self.x0.to_string());
        flag("iters", self.iters.to_string());
        flag("tol", self.tol.to_string());
        flag("seed", self.seed.to_string());
        if let Some(out) = &self.out {
            flag("out", out.display().to_string());
        }
        flag("reps", self.reps.to_string());
        if !self.properties.is_empty() {
            flag("properties", self.properties.join(","));
        }
        flag("instances", self.instances.to_string());
        if self.inject_fault {
            a.push("--inject-fault".into());
        }
        if self.timing {
            a.push("--timing".into());
        }
        a
    }

    pub fn spec(&self) -> Result<OperatorSpec, QsoError> {
        let m = self
            .m
            .ok_or_else(|| QsoError::InvalidArgument(format!("{} needs --m", self.command.as_str())))?;
        OperatorSpec::parse(m, &self.perm, self.alpha)
    }

    pub fn start(&self, m: usize) -> Result<SimplexPoint, QsoError> {
        match &self.x0 {
            X0::Uniform => SimplexPoint::barycenter(m),
            X0::Random => seeded_point(m, self.seed),
            X0::List(v) => {
                if v.len() != m {
                    return Err(QsoError::DimensionMismatch {
                        expected: m,
                        actual: v.len(),
                    });
                }
                make_point(v)
            }
        }
    }
}
