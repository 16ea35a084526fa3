//! Trajectory files: UTF-8 CSV, header `n,x1,...,xm`, LF line endings.
//!
//! Values are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::io::{BufRead, Write};

use crate::error::{QsoError, Result};

/// Header line for dimension `m`, without the trailing newline.
pub fn trajectory_header(m: usize) -> String {
    let mut h = String::from("n");
    for k in 1..=m {
        h.push_str(&format!(",x{k}"));
    }
    h
}

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Streams rows to `w` as they are produced.
pub struct TrajectoryWriter<W: Write> {
    w: W,
    m: usize,
    line: String,
}

impl<W: Write> TrajectoryWriter<W> {
    pub fn new(mut w: W, m: usize) -> std::io::Result<Self> {
        writeln!(w, "{}", trajectory_header(m))?;
        Ok(Self { w, m, line: String::new() })
    }

    pub fn row(&mut self, n: usize, x: &[f64]) -> std::io::Result<()> {
        debug_assert_eq!(x.len(), self.m);
        self.line.clear();
        self.line.push_str(&n.to_string());
        for &v in x {
            self.line.push(',');
            self.line.push_str(&format_value(v));
        }
        self.line.push('\n');
        self.w.write_all(self.line.as_bytes())
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        self.w.flush()?;
        Ok(self.w)
    }
}

/// Parses a trajectory file into `(n, coords)` rows.
pub fn read_trajectory<R: BufRead>(r: R) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| QsoError::Parse("empty trajectory file".into()))?
        .map_err(|e| QsoError::Parse(e.to_string()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let m = cols.len() - 1;
    if m < 2 || header != trajectory_header(m) {
        return Err(QsoError::Parse(format!("bad header {header:?}")));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| QsoError::Parse(e.to_string()))?;
        let bad = |what: &str| QsoError::Parse(format!("line {}: {what}", lineno + 2));
        let mut fields = line.split(',');
        let n: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| bad("bad step index"))?;
        let x: Vec<f64> = fields
            .map(|f| f.parse::<f64>().map_err(|_| bad("bad value")))
            .collect::<Result<_>>()?;
        if x.len() != m {
            return Err(bad("wrong number of columns"));
        }
        rows.push((n, x));
    }
    Ok(rows)
}
