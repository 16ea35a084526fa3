//! Cesàro averages `A_n = (1/n) Σ_{k<n} x^{(k)}`.

use serde::{Deserialize, Serialize};

use super::Stepper;
use crate::error::{QsoError, Result};
use crate::operator::OperatorSpec;
use crate::simplex::{l1, SimplexPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CesaroAverage {
    pub n: usize,
    pub average: SimplexPoint,
    /// `‖A_n - A_{⌊n/2⌋}‖₁` (zero for `n = 1`).
    pub tail_delta: f64,
}

/// `{N/8, N/4, N/2, N}` without zeros or repeats.
pub fn doubling_schedule(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = [n / 8, n / 4, n / 2, n].into_iter().filter(|&k| k > 0).collect();
    v.dedup();
    v
}

/// Neumaier-compensated running sum of points.
struct CompensatedSum {
    sum: Vec<f64>,
    comp: Vec<f64>,
}

impl CompensatedSum {
    fn new(m: usize) -> Self {
        Self {
            sum: vec![0.0; m],
            comp: vec![0.0; m],
        }
    }

    fn add(&mut self, x: &[f64]) {
        for ((s, c), &v) in self.sum.iter_mut().zip(&mut self.comp).zip(x) {
            let t = *s + v;
            if s.abs() >= v.abs() {
                *c += (*s - t) + v;
            } else {
                *c += (v - t) + *s;
            }
            *s = t;
        }
    }

    fn mean(&self, n: usize) -> Vec<f64> {
        self.sum
            .iter()
            .zip(&self.comp)
            .map(|(s, c)| (s + c) / n as f64)
            .collect()
    }
}

/// `A_n` at each of `checkpoints` in a single pass over the orbit.
pub fn cesaro_schedule(
    spec: &OperatorSpec,
    x0: &SimplexPoint,
    checkpoints: &[usize],
) -> Result<Vec<CesaroAverage>> {
    if checkpoints.contains(&0) {
        return Err(QsoError::InvalidArgument("averages need n >= 1".into()));
    }
    let mut needed: Vec<usize> = checkpoints
        .iter()
        .flat_map(|&n| [n, (n / 2).max(1)])
        .collect();
    needed.sort_unstable();
    needed.dedup();
    let Some(&last) = needed.last() else {
        return Ok(Vec::new());
    };

    let mut st = Stepper::new(spec, x0)?;
    let mut acc = CompensatedSum::new(spec.m());
    let mut means: Vec<(usize, Vec<f64>)> = Vec::with_capacity(needed.len());
    let mut next = needed.iter().copied().peekable();
    for count in 1..=last {
        acc.add(st.current());
        if next.peek() == Some(&count) {
            means.push((count, acc.mean(count)));
            next.next();
        }
        if count < last {
            st.step();
        }
    }
    let lookup = |n: usize| -> &Vec<f64> {
        let i = means.binary_search_by_key(&n, |(k, _)| *k).expect("checkpoint recorded");
        &means[i].1
    };
    checkpoints
        .iter()
        .map(|&n| {
            let a = lookup(n);
            let half = lookup((n / 2).max(1));
            Ok(CesaroAverage {
                n,
                tail_delta: l1(a, half),
                average: SimplexPoint::new(a.clone())?,
            })
        })
        .collect()
}

/// `A_n` and its tail delta.
pub fn cesaro_average(spec: &OperatorSpec, x0: &SimplexPoint, n: usize) -> Result<CesaroAverage> {
    Ok(cesaro_schedule(spec, x0, &[n])?.remove(0))
}
