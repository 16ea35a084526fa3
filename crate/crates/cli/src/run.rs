//! Command execution. Each command renders its whole output into memory;
//! `main` writes it once.

use std::time::Instant;

use qso_core::dynamics::{cesaro_schedule, doubling_schedule, omega_limit};
use qso_core::io::TrajectoryWriter;
use qso_core::operator::{classify_fixed_point, fixed_point_residual, fixed_points, XDescription};
use qso_core::verify::{orbit_mean, run_verify, VerifyOptions, VerifySummary};
use qso_core::{
    iterate, CesaroAverage, OmegaLimitReport, OperatorSpec, QsoError, SimplexPoint, StabilityReport,
};
use serde::{Deserialize, Serialize};

use crate::config::{Command, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    PropertyFailure = 1,
    Config = 2,
    Io = 3,
    NoConvergence = 4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope<T> {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub config: RunConfig,
    pub result: T,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResult {
    pub converged: bool,
    pub report: Option<OmegaLimitReport>,
    /// Best residual seen when the run did not converge.
    pub residual: Option<f64>,
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub residual: f64,
    pub stability: StabilityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixpointsResult {
    pub vertex: PointReport,
    pub x_set: XDescription,
    pub representatives: Vec<PointReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitComparison {
    pub period: usize,
    pub orbit_mean: SimplexPoint,
    /// `‖A_N - orbit mean‖₁` at the last checkpoint.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicResult {
    pub averages: Vec<CesaroAverage>,
    pub tail_deltas_decreasing: bool,
    /// Present when the orbit's limit set was found within `iters`.
    pub limit: Option<OrbitComparison>,
}

pub struct Outcome {
    pub output: Vec<u8>,
    pub code: Exit,
}

/// Error that stops a run before any output is produced.
#[derive(Debug)]
pub struct Failure {
    pub code: Exit,
    pub message: String,
}

impl From<QsoError> for Failure {
    fn from(e: QsoError) -> Self {
        let code = match e {
            QsoError::NoConvergence { .. } | QsoError::EigenNoConvergence(_) => Exit::NoConvergence,
            _ => Exit::Config,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let started = Instant::now();
    match cfg.command {
        Command::Simulate => simulate(cfg),
        Command::Classify => {
            let (result, code) = classify(cfg)?;
            Ok(envelope(cfg, result, code, started))
        }
        Command::Fixpoints => Ok(envelope(cfg, fixpoints(cfg)?, Exit::Ok, started)),
        Command::Ergodic => Ok(envelope(cfg, ergodic(cfg)?, Exit::Ok, started)),
        Command::Verify => {
            let summary = verify(cfg)?;
            let code = if summary.passed { Exit::Ok } else { Exit::PropertyFailure };
            Ok(envelope(cfg, summary, code, started))
        }
    }
}

fn envelope<T: Serialize>(cfg: &RunConfig, result: T, code: Exit, started: Instant) -> Outcome {
    let env = ReportEnvelope {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: cfg.command,
        config: cfg.clone(),
        result,
        wall_time_s: cfg.timing.then(|| started.elapsed().as_secs_f64()),
    };
    let mut output = serde_json::to_vec_pretty(&env).expect("reports serialize");
    output.push(b'\n');
    Outcome { output, code }
}

fn spec_and_start(cfg: &RunConfig) -> Result<(OperatorSpec, SimplexPoint), Failure> {
    let spec = cfg.spec()?;
    let x0 = cfg.start(spec.m())?;
    Ok((spec, x0))
}

fn simulate(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (spec, x0) = spec_and_start(cfg)?;
    let t = iterate(&spec, &x0, cfg.iters)?;
    let mut w = TrajectoryWriter::new(Vec::new(), spec.m()).expect("in-memory write");
    for (n, p) in t.points.iter().enumerate() {
        w.row(n, p.coords()).expect("in-memory write");
    }
    Ok(Outcome {
        output: w.finish().expect("in-memory write"),
        code: Exit::Ok,
    })
}

fn classify(cfg: &RunConfig) -> Result<(ClassifyResult, Exit), Failure> {
    let (spec, x0) = spec_and_start(cfg)?;
    match omega_limit(&spec, &x0, cfg.iters, cfg.tol) {
        Ok(report) => Ok((
            ClassifyResult {
                converged: true,
                report: Some(report),
                residual: None,
                iterations: None,
            },
            Exit::Ok,
        )),
        Err(QsoError::NoConvergence { iterations, residual }) => Ok((
            ClassifyResult {
                converged: false,
                report: None,
                residual: Some(residual),
                iterations: Some(iterations),
            },
            Exit::NoConvergence,
        )),
        Err(e) => Err(e.into()),
    }
}

fn point_report(spec: &OperatorSpec, p: &SimplexPoint) -> Result<PointReport, Failure> {
    Ok(PointReport {
        residual: fixed_point_residual(spec, p)?,
        stability: classify_fixed_point(spec, p)?,
    })
}

fn fixpoints(cfg: &RunConfig) -> Result<FixpointsResult, Failure> {
    let spec = cfg.spec()?;
    let set = fixed_points(&spec, cfg.reps, cfg.seed);
    Ok(FixpointsResult {
        vertex: point_report(&spec, &set.vertex)?,
        representatives: set
            .representatives
            .iter()
            .map(|r| point_report(&spec, r))
            .collect::<Result<_, _>>()?,
        x_set: set.x_set,
    })
}

fn ergodic(cfg: &RunConfig) -> Result<ErgodicResult, Failure> {
    let (spec, x0) = spec_and_start(cfg)?;
    if cfg.iters == 0 {
        return Err(QsoError::InvalidArgument("ergodic needs --iters >= 1".into()).into());
    }
    let averages = cesaro_schedule(&spec, &x0, &doubling_schedule(cfg.iters))?;
    let tail_deltas_decreasing = averages.windows(2).all(|w| w[1].tail_delta <= w[0].tail_delta);
    let limit = omega_limit(&spec, &x0, cfg.iters, cfg.tol).ok().map(|r| {
        let mean = orbit_mean(&r.limit_points);
        let last = averages.last().expect("non-empty schedule");
        let distance = last
            .average
            .coords()
            .iter()
            .zip(&mean)
            .map(|(a, b)| (a - b).abs())
            .sum();
        OrbitComparison {
            period: r.period,
            orbit_mean: SimplexPoint::new(mean).expect("mean of simplex points"),
            distance,
        }
    });
    Ok(ErgodicResult {
        averages,
        tail_deltas_decreasing,
        limit,
    })
}

fn verify(cfg: &RunConfig) -> Result<VerifySummary, Failure> {
    let opts = VerifyOptions {
        seed: cfg.seed,
        instances: cfg.instances,
        inject_fault: cfg.inject_fault,
    };
    Ok(run_verify(&cfg.properties, &opts)?)
}
