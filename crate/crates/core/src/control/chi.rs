use nalgebra::Matrix3;
use serde::Serialize;

use super::grid::TimeGrid;
use super::propagate::{control_traces, ControlTrace, PropagateOptions};
use crate::error::{Error, Result};
use crate::sequence::{ColoredSchedule, Sequence};

/// Default suppression tolerance, relative to `τ_c`.
pub const DEFAULT_TOL: f64 = 1e-8;

pub const AXES: [&str; 3] = ["X", "Y", "Z"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    OneLocal,
    TwoLocal,
}

/// `χ₁^{μα}` (indexed `[μ][α]`) or `χ₂^{ZZαβ}` (indexed `[α][β]`), in seconds.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorMatrix {
    pub kind: ErrorKind,
    pub values: Matrix3<f64>,
    pub duration: f64,
}

impl ErrorMatrix {
    pub fn max_abs(&self) -> f64 {
        self.values.amax()
    }
}

/// Composite Simpson rule over each piece of the grid.
pub fn integrate(grid: &TimeGrid, f: impl Fn(usize) -> f64) -> f64 {
    let mut total = 0.0;
    for p in &grid.pieces {
        let n = p.intervals();
        if n == 0 {
            continue;
        }
        let h = (p.t1 - p.t0) / n as f64;
        let i0 = p.nodes.start;
        let mut s = f(i0) + f(i0 + n);
        for j in 1..n {
            s += f(i0 + j) * if j % 2 == 1 { 4.0 } else { 2.0 };
        }
        total += s * h / 3.0;
    }
    total
}

/// 1-local error matrix `∫ R^{μα} dt`.
pub fn chi1(trace: &ControlTrace) -> ErrorMatrix {
    let mut v = Matrix3::zeros();
    for mu in 0..3 {
        for a in 0..3 {
            v[(mu, a)] = integrate(&trace.grid, |i| trace.r[i][(mu, a)]);
        }
    }
    ErrorMatrix {
        kind: ErrorKind::OneLocal,
        values: v,
        duration: trace.duration(),
    }
}

/// 2-local error matrix `∫ R_v^{Zα} R_w^{Zβ} dt` for traces on one grid.
pub fn chi2(a: &ControlTrace, b: &ControlTrace) -> Result<ErrorMatrix> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let mut v = Matrix3::zeros();
    for al in 0..3 {
        for be in 0..3 {
            v[(al, be)] = integrate(&a.grid, |i| a.r[i][(2, al)] * b.r[i][(2, be)]);
        }
    }
    Ok(ErrorMatrix {
        kind: ErrorKind::TwoLocal,
        values: v,
        duration: a.duration(),
    })
}

/// Either a staggered pair or one schedule applied to every qubit.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Schedule(&'a ColoredSchedule),
    Simultaneous(&'a Sequence),
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryVerdict {
    pub kind: String,
    pub row: &'static str,
    pub col: &'static str,
    pub value_s: f64,
    pub pass: bool,
}

/// First-order suppression check. The verdict covers the 2-local matrix;
/// 1-local entries are reported with their own pass flags.
#[derive(Clone, Debug)]
pub struct SuppressionReport {
    pub duration: f64,
    pub tol: f64,
    pub chi1: Vec<(String, ErrorMatrix)>,
    pub chi2: ErrorMatrix,
    pub entries: Vec<EntryVerdict>,
    /// Largest `|χ₂|` relative to `τ_c`.
    pub max_residual: f64,
    pub pass: bool,
}

impl SuppressionReport {
    /// Entries of the 2-local matrix that exceed the tolerance.
    pub fn failures(&self) -> Vec<(&'static str, &'static str)> {
        self.entries
            .iter()
            .filter(|e| e.kind == "two_local" && !e.pass)
            .map(|e| (e.row, e.col))
            .collect()
    }
}

fn verdicts(kind: &str, m: &ErrorMatrix, bound: f64, out: &mut Vec<EntryVerdict>) {
    for i in 0..3 {
        for j in 0..3 {
            let v = m.values[(i, j)];
            out.push(EntryVerdict {
                kind: kind.to_string(),
                row: AXES[i],
                col: AXES[j],
                value_s: v,
                pass: v.abs() <= bound,
            });
        }
    }
}

pub fn verify_first_order(target: Target<'_>, opts: PropagateOptions, tol: f64) -> Result<SuppressionReport> {
    if !(tol > 0.0) {
        return Err(crate::error::invalid("tol", "must be positive"));
    }
    let (chi1s, x2) = match target {
        Target::Schedule(s) => {
            let tr = control_traces(&[&s.red, &s.blue], opts)?;
            (
                vec![
                    ("one_local_red".to_string(), chi1(&tr[0])),
                    ("one_local_blue".to_string(), chi1(&tr[1])),
                ],
                chi2(&tr[0], &tr[1])?,
            )
        }
        Target::Simultaneous(s) => {
            let tr = control_traces(&[s], opts)?;
            (vec![("one_local".to_string(), chi1(&tr[0]))], chi2(&tr[0], &tr[0])?)
        }
    };
    let tc = x2.duration;
    let bound = tol * tc;
    let mut entries = Vec::new();
    for (k, m) in &chi1s {
        verdicts(k, m, bound, &mut entries);
    }
    verdicts("two_local", &x2, bound, &mut entries);
    let max_residual = x2.max_abs() / tc;
    Ok(SuppressionReport {
        duration: tc,
        tol,
        pass: max_residual <= tol,
        chi1: chi1s,
        chi2: x2,
        entries,
        max_residual,
    })
}
