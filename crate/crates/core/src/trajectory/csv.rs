use std::fmt::Write;

use super::Trajectory;
use crate::error::{BridgeError, Result};

pub(super) fn format(t: &Trajectory) -> String {
    let mut s = String::with_capacity(t.len() * (24 * (t.dim() + 1) + 8));
    s.push_str("step,t");
    for a in 0..t.dim() {
        let _ = write!(s, ",x{a}");
    }
    s.push('\n');
    for (k, p) in t.points().enumerate() {
        let _ = write!(s, "{k},{:.16e}", k as f64 * t.dt());
        for v in p {
            let _ = write!(s, ",{v:.16e}");
        }
        s.push('\n');
    }
    s
}

/// A trajectory read back from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTrajectory {
    pub dim: usize,
    pub times: Vec<f64>,
    /// Flat, `positions[k*dim + a]`.
    pub positions: Vec<f64>,
}

impl CsvTrajectory {
    pub fn point(&self, k: usize) -> &[f64] {
        &self.positions[k * self.dim..(k + 1) * self.dim]
    }
    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub fn parse_csv(text: &str) -> Result<CsvTrajectory> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| BridgeError::Csv("empty file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[0] != "step" || cols[1] != "t" {
        return Err(BridgeError::Csv(format!("unexpected header {header:?}")));
    }
    for (a, c) in cols[2..].iter().enumerate() {
        if *c != format!("x{a}") {
            return Err(BridgeError::Csv(format!("unexpected column {c:?}")));
        }
    }
    let dim = cols.len() - 2;
    let mut times = Vec::new();
    let mut positions = Vec::new();
    for (row, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 2 {
            return Err(BridgeError::Csv(format!("row {row}: expected {} fields", dim + 2)));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| BridgeError::Csv(format!("row {row}: {s:?}: {e}")))
        };
        times.push(num(fields[1])?);
        for f in &fields[2..] {
            positions.push(num(f)?);
        }
    }
    Ok(CsvTrajectory {
        dim,
        times,
        positions,
    })
}
