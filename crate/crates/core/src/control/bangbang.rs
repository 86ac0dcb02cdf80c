use nalgebra::Matrix3;

use super::grid::plan;
use super::propagate::ControlTrace;
use crate::error::{Error, Result};
use crate::linalg::{axis, so3_rotation};
use crate::sequence::Sequence;

/// Piecewise-constant toggling-frame trace for ideal pulses, built by
/// composing SO(3) rotations directly (`R ← Rot(n_φ, θ) R` at each pulse).
pub fn bang_bang_trace(seq: &Sequence, samples: usize) -> Result<ControlTrace> {
    if !seq.shape.is_ideal() && seq.pulse_count() > 0 {
        return Err(Error::BoundedPulse(seq.shape.kind().to_string()));
    }
    bang_bang_traces(&[seq], samples).map(|mut v| v.pop().expect("one lane"))
}

/// Bang-bang traces of several ideal schedules on a shared grid.
pub fn bang_bang_traces(seqs: &[&Sequence], samples: usize) -> Result<Vec<ControlTrace>> {
    for s in seqs {
        if !s.shape.is_ideal() && s.pulse_count() > 0 {
            return Err(Error::BoundedPulse(s.shape.kind().to_string()));
        }
    }
    let p = plan(seqs, samples)?;
    Ok(p.lanes
        .iter()
        .map(|lane| {
            let mut r = Matrix3::identity();
            let mut out = Vec::with_capacity(p.grid.times.len());
            for (k, piece) in p.grid.pieces.iter().enumerate() {
                for &(phase, flip) in &lane.kicks[k] {
                    r = so3_rotation(axis(phase), flip) * r;
                }
                out.extend(std::iter::repeat(r).take(piece.nodes.len()));
            }
            ControlTrace {
                grid: p.grid.clone(),
                r: out,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::chi::{chi1, chi2};
    use crate::control::propagate::control_trace;
    use crate::sequence::{build_named, catalog_phases, ideal_symmetric_pair, sim_variant, PulseShape};

    fn signs(tr: &ControlTrace) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for p in &tr.grid.pieces {
            let v = tr.r[p.nodes.start][(2, 2)].round();
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn xy4_zz_alternates() {
        let s = build_named("XY4", 1.0, PulseShape::Ideal).unwrap();
        let tr = bang_bang_trace(&s, 16).unwrap();
        assert_eq!(signs(&tr), vec![1.0, -1.0, 1.0, -1.0, 1.0]);
    }

    #[test]
    fn ur10_returns_to_plus_one() {
        let s = build_named("UR10", 1.0, PulseShape::Ideal).unwrap();
        let tr = bang_bang_trace(&s, 16).unwrap();
        assert!((tr.r.last().unwrap()[(2, 2)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_unitary_route() {
        let s = sim_variant(&catalog_phases("KDD").unwrap(), 1.0, 0.7, PulseShape::Ideal).unwrap();
        let a = bang_bang_trace(&s, 16).unwrap();
        let b = control_trace(&s, 16).unwrap();
        for (x, y) in a.r.iter().zip(&b.r) {
            assert!((x - y).amax() < 1e-12);
        }
    }

    #[test]
    fn symmetric_pair_cancels_zz() {
        let x = catalog_phases("XY4").unwrap();
        let p = ideal_symmetric_pair(&x, &x, 1.0).unwrap();
        let tr = bang_bang_traces(&[&p.red, &p.blue], 16).unwrap();
        let m = chi2(&tr[0], &tr[1]).unwrap();
        assert!(m.values[(2, 2)].abs() < 1e-12);
        let one = chi1(&tr[0]);
        assert!(one.max_abs() < 1e-12);
    }

    #[test]
    fn rejects_bounded() {
        let s = build_named("XY4", 1.0, PulseShape::Square).unwrap();
        assert!(matches!(bang_bang_trace(&s, 16), Err(Error::BoundedPulse(_))));
    }
}
