use nalgebra::Matrix3;

use super::grid::{plan, Lane, Plan, TimeGrid, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::linalg::{adjoint_rep, axis, bloch, c, identity2, rotation, unitarity_defect, I, M2};
use crate::sequence::Sequence;

/// Default bound on `‖M†M − I‖` for the propagator `M` of every step.
pub const DEFAULT_UNITARITY_TOL: f64 = 1e-10;
/// Bound on discarded imaginary parts of control-matrix entries.
pub const REALNESS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagateOptions {
    pub samples: usize,
    pub unitarity_tol: f64,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        PropagateOptions {
            samples: DEFAULT_SAMPLES,
            unitarity_tol: DEFAULT_UNITARITY_TOL,
        }
    }
}

impl PropagateOptions {
    pub fn samples(samples: usize) -> Self {
        PropagateOptions {
            samples,
            ..Default::default()
        }
    }
}

/// Control unitaries `U_C(t_i)` at every grid node.
#[derive(Clone, Debug)]
pub struct Propagation {
    pub grid: TimeGrid,
    pub unitaries: Vec<M2>,
}

/// Control matrix `R^{μα}(t_i)` at every grid node.
#[derive(Clone, Debug)]
pub struct ControlTrace {
    pub grid: TimeGrid,
    pub r: Vec<Matrix3<f64>>,
}

impl ControlTrace {
    pub fn duration(&self) -> f64 {
        self.grid.duration()
    }

    /// One component `R^{μα}` over all nodes.
    pub fn component(&self, mu: usize, alpha: usize) -> Vec<f64> {
        self.r.iter().map(|m| m[(mu, alpha)]).collect()
    }

    /// Index of the last node at or before `t`.
    pub fn node_at(&self, t: f64) -> usize {
        self.grid.times.partition_point(|&x| x <= t).saturating_sub(1)
    }
}

/// One classical fourth-order step of `U' = −i (h(t)·σ) U`.
fn rk4_step(field: &impl Fn(f64) -> [f64; 3], u: &M2, t: f64, dt: f64) -> M2 {
    let f = |tt: f64, v: &M2| (bloch(field(tt)) * v) * (-I);
    let k1 = f(t, u);
    let k2 = f(t + dt / 2.0, &(u + k1 * c(dt / 2.0)));
    let k3 = f(t + dt / 2.0, &(u + k2 * c(dt / 2.0)));
    let k4 = f(t + dt, &(u + k3 * c(dt)));
    u + (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(dt / 6.0)
}

/// Propagator from `t0` to `t1` in `steps` uniform steps.
pub fn rk4_unitary(field: impl Fn(f64) -> [f64; 3], t0: f64, t1: f64, steps: usize) -> M2 {
    let dt = (t1 - t0) / steps as f64;
    let mut u = identity2();
    for i in 0..steps {
        u = rk4_step(&field, &u, t0 + i as f64 * dt, dt);
    }
    u
}

fn run_lane(plan: &Plan, lane: &Lane, tol: f64) -> Result<Vec<M2>> {
    let g = &plan.grid;
    let mut out = Vec::with_capacity(g.times.len());
    let mut u = identity2();
    for (k, piece) in g.pieces.iter().enumerate() {
        for &(phase, flip) in &lane.kicks[k] {
            u = rotation(axis(phase), flip) * u;
        }
        let mut prev_t = g.times[piece.nodes.start];
        for i in piece.nodes.clone() {
            let t = g.times[i];
            if i > piece.nodes.start {
                if let Some(d) = &lane.drives[k] {
                    let step = rk4_step(&|s| d.field(s), &identity2(), prev_t, t - prev_t);
                    let defect = unitarity_defect(&step);
                    if defect > tol {
                        return Err(Error::IntegrationFailure { t, defect });
                    }
                    u = step * u;
                }
            }
            prev_t = t;
            out.push(u);
        }
    }
    Ok(out)
}

/// Integrate several equal-length schedules on one shared grid.
pub fn propagate_many(seqs: &[&Sequence], opts: PropagateOptions) -> Result<Vec<Propagation>> {
    let p = plan(seqs, opts.samples)?;
    p.lanes
        .iter()
        .map(|lane| {
            Ok(Propagation {
                grid: p.grid.clone(),
                unitaries: run_lane(&p, lane, opts.unitarity_tol)?,
            })
        })
        .collect()
}

/// Control unitaries for one schedule with `samples` nodes per pulse.
pub fn propagate(seq: &Sequence, samples: usize) -> Result<Propagation> {
    Ok(propagate_many(&[seq], PropagateOptions::samples(samples))?
        .pop()
        .expect("one lane"))
}

impl Propagation {
    pub fn control_trace(&self) -> Result<ControlTrace> {
        let mut r = Vec::with_capacity(self.unitaries.len());
        for (u, &t) in self.unitaries.iter().zip(&self.grid.times) {
            let (m, imag) = adjoint_rep(u);
            if imag > REALNESS_TOL {
                return Err(Error::NonReal { t, imag });
            }
            r.push(m);
        }
        Ok(ControlTrace {
            grid: self.grid.clone(),
            r,
        })
    }
}

/// Control traces of several schedules on a shared grid.
pub fn control_traces(seqs: &[&Sequence], opts: PropagateOptions) -> Result<Vec<ControlTrace>> {
    propagate_many(seqs, opts)?
        .iter()
        .map(Propagation::control_trace)
        .collect()
}

pub fn control_trace(seq: &Sequence, samples: usize) -> Result<ControlTrace> {
    propagate(seq, samples)?.control_trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli_x;
    use crate::sequence::{build_named, sim_variant, PulseShape, Segment};
    use std::f64::consts::PI;

    #[test]
    fn pure_delay_is_identity() {
        let s = Sequence::idle("idle", 3.0).unwrap();
        let p = propagate(&s, 16).unwrap();
        assert!(p.unitaries.iter().all(|u| (u - identity2()).norm() == 0.0));
        let tr = p.control_trace().unwrap();
        assert!(tr.r.iter().all(|m| *m == Matrix3::identity()));
    }

    #[test]
    fn single_ideal_x_pulse() {
        let s = Sequence::new(
            "x",
            1.0,
            PulseShape::Ideal,
            vec![
                Segment::Delay { duration: 0.5 },
                Segment::Pulse { phase: 0.0, flip_angle: PI },
                Segment::Delay { duration: 0.5 },
            ],
        )
        .unwrap();
        let p = propagate(&s, 16).unwrap();
        let end = p.unitaries.last().unwrap();
        assert!((end - pauli_x() * (-I)).norm() < 1e-15);
    }

    #[test]
    fn square_pulse_mid_point_matches_closed_form() {
        let s = build_named("XY4", 1.0, PulseShape::Square).unwrap();
        let p = propagate(&s, 256).unwrap();
        let mid = p.grid.times.iter().position(|&t| t == 0.5).unwrap();
        let exact = rotation([1.0, 0.0, 0.0], PI / 2.0);
        assert!((p.unitaries[mid] - exact).norm() < 1e-10);
    }

    #[test]
    fn ideal_xy4_toggles_after_first_pulse() {
        let s = sim_variant(&[0.0, PI / 2.0, 0.0, PI / 2.0], 1.0, 1.0, PulseShape::Ideal).unwrap();
        let tr = control_trace(&s, 16).unwrap();
        let m = tr.r[tr.node_at(1.0)];
        assert!((m[(2, 2)] + 1.0).abs() < 1e-15);
        assert!((m[(1, 1)] + 1.0).abs() < 1e-15);
        assert!((m[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn square_rzz_is_cos_theta() {
        let s = build_named("XY4", 1.0, PulseShape::Square).unwrap();
        let tr = control_trace(&s, 256).unwrap();
        for i in 0..=256 {
            let t = tr.grid.times[i];
            assert!((tr.r[i][(2, 2)] - (PI * t).cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn unitarity_failure_is_reported_at_coarse_grid() {
        let s = build_named("XY4", 1.0, PulseShape::Square).unwrap();
        let r = propagate_many(
            &[&s],
            PropagateOptions {
                samples: 16,
                unitarity_tol: 1e-12,
            },
        );
        assert!(matches!(r, Err(Error::IntegrationFailure { .. })));
    }
}
