use serde::Serialize;

use super::chi::AXES;
use super::propagate::ControlTrace;
use crate::error::{Error, Result};

/// Default relative L² tolerance.
pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    DisplacementSymmetric,
    DisplacementAntisymmetric,
    MirrorSymmetric,
    MirrorAntisymmetric,
}

impl Relation {
    pub const ALL: [Relation; 4] = [
        Relation::DisplacementSymmetric,
        Relation::DisplacementAntisymmetric,
        Relation::MirrorSymmetric,
        Relation::MirrorAntisymmetric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::DisplacementSymmetric => "displacement_symmetric",
            Relation::DisplacementAntisymmetric => "displacement_antisymmetric",
            Relation::MirrorSymmetric => "mirror_symmetric",
            Relation::MirrorAntisymmetric => "mirror_antisymmetric",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationCheck {
    pub relation: Relation,
    pub residual: f64,
    pub flag: bool,
}

/// Symmetry classes of one control-matrix component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub mu: &'static str,
    pub alpha: &'static str,
    pub checks: Vec<RelationCheck>,
}

impl SymmetryReport {
    pub fn has(&self, r: Relation) -> bool {
        self.checks.iter().any(|c| c.relation == r && c.flag)
    }

    pub fn residual(&self, r: Relation) -> f64 {
        self.checks
            .iter()
            .find(|c| c.relation == r)
            .map(|c| c.residual)
            .unwrap_or(f64::NAN)
    }
}

/// Cell averages (trapezoid) of one component over a uniform grid.
fn cell_averages(trace: &ControlTrace, mu: usize, alpha: usize) -> Result<Vec<f64>> {
    let g = &trace.grid;
    let mut width: Option<f64> = None;
    let mut cells = Vec::with_capacity(g.times.len());
    for p in &g.pieces {
        let n = p.intervals();
        if n == 0 {
            continue;
        }
        let w = (p.t1 - p.t0) / n as f64;
        match width {
            None => width = Some(w),
            Some(w0) if (w - w0).abs() > 1e-9 * w0 => {
                return Err(Error::NonUniformGrid(format!("cell widths {w0:e} and {w:e}")));
            }
            _ => {}
        }
        for i in p.nodes.start..p.nodes.end - 1 {
            cells.push(0.5 * (trace.r[i][(mu, alpha)] + trace.r[i + 1][(mu, alpha)]));
        }
    }
    if cells.is_empty() || cells.len() % 2 == 1 {
        return Err(Error::NonUniformGrid(format!("{} cells", cells.len())));
    }
    Ok(cells)
}

fn rel(a: &[f64], b: &[f64], sign: f64) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (y - sign * x).powi(2)).sum::<f64>().sqrt();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / (na + nb)
}

/// Displacement (`R(t+τ_c/2) = ±R(t)`) and mirror (`R(τ_c−t) = ±R(t)`)
/// relations of component `(μ, α)`, as relative L² residuals of cell averages.
/// A component that vanishes identically satisfies all four.
pub fn classify_symmetry(trace: &ControlTrace, mu: usize, alpha: usize, tol: f64) -> Result<SymmetryReport> {
    let a = cell_averages(trace, mu, alpha)?;
    let n = a.len();
    let half = n / 2;
    let zero = a.iter().all(|x| x.abs() <= 1e-12);
    let first = &a[..half];
    let shifted = &a[half..];
    let mirrored: Vec<f64> = a.iter().rev().take(half).copied().collect();
    let checks = Relation::ALL
        .iter()
        .map(|&r| {
            let residual = if zero {
                0.0
            } else {
                match r {
                    Relation::DisplacementSymmetric => rel(first, shifted, 1.0),
                    Relation::DisplacementAntisymmetric => rel(first, shifted, -1.0),
                    Relation::MirrorSymmetric => rel(first, &mirrored, 1.0),
                    Relation::MirrorAntisymmetric => rel(first, &mirrored, -1.0),
                }
            };
            RelationCheck {
                relation: r,
                residual,
                flag: residual <= tol,
            }
        })
        .collect();
    Ok(SymmetryReport {
        mu: AXES[mu],
        alpha: AXES[alpha],
        checks,
    })
}

/// All nine components.
pub fn classify_all(trace: &ControlTrace, tol: f64) -> Result<Vec<SymmetryReport>> {
    let mut out = Vec::with_capacity(9);
    for mu in 0..3 {
        for al in 0..3 {
            out.push(classify_symmetry(trace, mu, al, tol)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::grid::DEFAULT_SAMPLES;
    use crate::control::propagate::{control_trace, control_traces, PropagateOptions};
    use crate::sequence::{ColoredSchedule, PulseShape, Sequence};

    #[test]
    fn cr_xy4_classes() {
        let s = ColoredSchedule::named("XY4", "XY4", 1.0, PulseShape::Square).unwrap();
        let tr = control_traces(&[&s.red, &s.blue], PropagateOptions::default()).unwrap();
        let zz = classify_symmetry(&tr[0], 2, 2, DEFAULT_SYMMETRY_TOL).unwrap();
        assert!(zz.has(Relation::DisplacementSymmetric));
        assert!(!zz.has(Relation::DisplacementAntisymmetric));
        let zx = classify_symmetry(&tr[0], 2, 0, DEFAULT_SYMMETRY_TOL).unwrap();
        assert!(zx.has(Relation::DisplacementAntisymmetric));
        assert!(!zx.has(Relation::DisplacementSymmetric));
    }

    #[test]
    fn zero_component_sets_all_flags() {
        let tr = control_trace(&Sequence::idle("d", 1.0).unwrap(), DEFAULT_SAMPLES).unwrap();
        let r = classify_symmetry(&tr, 0, 1, DEFAULT_SYMMETRY_TOL).unwrap();
        assert!(Relation::ALL.iter().all(|&x| r.has(x)));
        let d = classify_symmetry(&tr, 0, 0, DEFAULT_SYMMETRY_TOL).unwrap();
        assert!(d.has(Relation::DisplacementSymmetric) && d.has(Relation::MirrorSymmetric));
        assert!(!d.has(Relation::MirrorAntisymmetric));
    }
}
