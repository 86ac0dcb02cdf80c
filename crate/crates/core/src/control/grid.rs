//! Shared time grid for one or more schedules.
//!
//! The grid is split into pieces at every segment boundary of every
//! schedule. Each piece carries its own uniformly spaced nodes, so the node at
//! the end of one piece and the start of the next share a time. Ideal pulses
//! act between those two nodes. Zero-length marker pieces at `0` and `τ_c`
//! hold the state before a pulse at `t = 0` or after a pulse at `t = τ_c`.

use std::ops::Range;

use super::drag;
use crate::error::{invalid, Error, Result};
use crate::sequence::{envelope_unchecked, PulseShape, Sequence};

/// Smallest accepted samples-per-pulse.
pub const MIN_SAMPLES: usize = 16;
/// Default samples per pulse duration.
pub const DEFAULT_SAMPLES: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    /// Node indices, inclusive of both ends.
    pub nodes: Range<usize>,
    pub t0: f64,
    pub t1: f64,
}

impl Piece {
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }
}

/// Node times grouped into pieces; `h = τ_p / S` sets the spacing.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    pub samples_per_pulse: usize,
    pub times: Vec<f64>,
    pub pieces: Vec<Piece>,
}

impl TimeGrid {
    pub fn duration(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// A bounded pulse active during a piece.
#[derive(Clone, Debug)]
pub(crate) struct Drive {
    pub phase: f64,
    pub flip: f64,
    pub start: f64,
    pub tau_p: f64,
    pub shape: PulseShape,
    /// Amplitude scale and static detuning (rad/s) from calibration.
    pub scale: f64,
    pub detuning: f64,
}

impl Drive {
    /// Bloch vector `h` with `H(t) = h · σ` at absolute time `t`.
    pub fn field(&self, t: f64) -> [f64; 3] {
        let local = (t - self.start).clamp(0.0, self.tau_p);
        let (wi, wq) = envelope_unchecked(&self.shape, self.flip, self.tau_p, local);
        let (s, c) = self.phase.sin_cos();
        let a = 0.5 * self.scale * wi;
        let b = 0.5 * self.scale * wq;
        [a * c - b * s, a * s + b * c, 0.5 * self.detuning]
    }
}

/// Per-schedule content of every piece.
#[derive(Clone, Debug, Default)]
pub(crate) struct Lane {
    pub drives: Vec<Option<Drive>>,
    /// Instantaneous `(phase, flip)` pulses applied before each piece.
    pub kicks: Vec<Vec<(f64, f64)>>,
}

#[derive(Clone, Debug)]
pub(crate) struct Plan {
    pub grid: TimeGrid,
    pub lanes: Vec<Lane>,
}

fn pieces_for(d: f64, h: f64) -> usize {
    let n = ((d / h) - 1e-9).ceil().max(2.0) as usize;
    n + n % 2
}

/// Lay out a common grid for schedules of equal duration.
pub(crate) fn plan(seqs: &[&Sequence], samples: usize) -> Result<Plan> {
    if samples < MIN_SAMPLES {
        return Err(invalid("samples", format!("need at least {MIN_SAMPLES}, got {samples}")));
    }
    let first = seqs.first().ok_or_else(|| invalid("sequences", "none given"))?;
    let tc = first.duration();
    for s in seqs {
        let d = s.duration();
        if (d - tc).abs() > 1e-12 * tc.max(d) {
            return Err(Error::DurationMismatch(tc, d));
        }
    }
    if !(tc > 0.0) {
        return Err(invalid("sequence", "total duration must be positive"));
    }
    let tau_ref = seqs.iter().map(|s| s.tau_p).fold(0.0, f64::max);
    let max_pulses = seqs.iter().map(|s| s.pulse_count()).max().unwrap_or(0).max(1);
    let tau_ref = if tau_ref > 0.0 { tau_ref } else { tc / max_pulses as f64 };
    let h = tau_ref / samples as f64;
    let tol = 1e-12 * tc;

    let mut cuts: Vec<f64> = seqs.iter().flat_map(|s| s.breakpoints()).collect();
    cuts.push(0.0);
    cuts.sort_by(f64::total_cmp);
    let mut uniq: Vec<f64> = Vec::with_capacity(cuts.len());
    for t in cuts {
        match uniq.last() {
            Some(&l) if (t - l).abs() <= tol => {}
            _ => uniq.push(t),
        }
    }
    if let Some(l) = uniq.last_mut() {
        *l = tc;
    }

    let windows: Vec<_> = seqs.iter().map(|s| s.pulse_windows()).collect();
    let kick_at = |t: f64| {
        windows
            .iter()
            .zip(seqs)
            .any(|(w, s)| s.shape.is_ideal() && w.iter().any(|p| (p.0 - t).abs() <= tol))
    };

    let mut spans: Vec<(f64, f64)> = Vec::new();
    if kick_at(0.0) {
        spans.push((0.0, 0.0));
    }
    spans.extend(uniq.windows(2).map(|w| (w[0], w[1])));
    if kick_at(tc) {
        spans.push((tc, tc));
    }

    let mut times = Vec::new();
    let mut pieces = Vec::with_capacity(spans.len());
    for &(a, b) in &spans {
        let start = times.len();
        if b > a {
            let n = pieces_for(b - a, h);
            for i in 0..=n {
                times.push(if i == n { b } else { a + (b - a) * i as f64 / n as f64 });
            }
        } else {
            times.push(a);
        }
        pieces.push(Piece {
            nodes: start..times.len(),
            t0: a,
            t1: b,
        });
    }

    let mut lanes = Vec::with_capacity(seqs.len());
    for (s, w) in seqs.iter().zip(&windows) {
        let mut lane = Lane {
            drives: vec![None; pieces.len()],
            kicks: vec![Vec::new(); pieces.len()],
        };
        if s.shape.is_ideal() {
            for &(t, _, phase, flip) in w {
                let k = pieces
                    .iter()
                    .rposition(|p| (p.t0 - t).abs() <= tol)
                    .expect("ideal pulse times are breakpoints");
                lane.kicks[k].push((phase, flip));
            }
        } else {
            let n_pulse = pieces_for(s.tau_p, h);
            for (k, p) in pieces.iter().enumerate() {
                if p.t1 <= p.t0 {
                    continue;
                }
                let mid = 0.5 * (p.t0 + p.t1);
                if let Some(&(start, _, phase, flip)) = w.iter().find(|q| q.0 < mid && mid < q.1) {
                    let (scale, detuning) = drag::calibration(&s.shape, flip, s.tau_p, n_pulse)?;
                    lane.drives[k] = Some(Drive {
                        phase,
                        flip,
                        start,
                        tau_p: s.tau_p,
                        shape: s.shape.clone(),
                        scale,
                        detuning,
                    });
                }
            }
        }
        lanes.push(lane);
    }

    Ok(Plan {
        grid: TimeGrid {
            samples_per_pulse: samples,
            times,
            pieces,
        },
        lanes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{cr_variant, ideal_symmetric_pair, PulseShape};

    #[test]
    fn cr_grid_nodes_at_boundaries() {
        let xy4 = [0.0, 1.0, 0.0, 1.0];
        let s = cr_variant(&xy4, &xy4, 1.0, PulseShape::Square).unwrap();
        let p = plan(&[&s.red, &s.blue], 16).unwrap();
        assert_eq!(p.grid.pieces.len(), 8);
        for (k, piece) in p.grid.pieces.iter().enumerate() {
            assert_eq!(piece.intervals(), 16);
            assert_eq!(p.grid.times[piece.nodes.start], k as f64);
            assert!(p.lanes[0].drives[k].is_some() != p.lanes[1].drives[k].is_some());
        }
    }

    #[test]
    fn marker_pieces_for_edge_kicks() {
        let s = ideal_symmetric_pair(&[0.0, 1.0], &[0.0, 1.0], 1.0).unwrap();
        let p = plan(&[&s.red], 16).unwrap();
        let last = p.grid.pieces.last().unwrap();
        assert_eq!(last.nodes.len(), 1);
        assert_eq!(p.lanes[0].kicks.last().unwrap().len(), 1);
    }

    #[test]
    fn rejects_mismatch_and_small_s() {
        let a = Sequence::idle("a", 1.0).unwrap();
        let b = Sequence::idle("b", 2.0).unwrap();
        assert!(matches!(plan(&[&a, &b], 16), Err(Error::DurationMismatch(..))));
        assert!(plan(&[&a], 8).is_err());
    }
}
