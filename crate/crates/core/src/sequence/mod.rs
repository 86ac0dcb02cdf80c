//! Pulse schedules: shapes, the named catalog, SIM/CR transforms and graph
//! colouring.
//!
//! A [`Sequence`] is an ordered list of [`Segment`]s sharing one pulse
//! duration and envelope. Phases are always listed in temporal order. Ideal
//! (bang-bang) pulses are instantaneous; when a transform asks for a pulse
//! slot of length `tau_p` the ideal pulse sits at the centre of that slot, so
//! an ideal schedule is the zero-width limit of the bounded one.

mod catalog;
mod graph;
mod transform;

pub use catalog::{build_named, canonical_name, catalog_phases, CATALOG};
pub use graph::{Color, QubitGraph};
pub use transform::{
    cr_variant, ideal_symmetric_pair, match_lengths, pad, pad_k, sim_k, sim_variant, Padding,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default Gaussian width as a fraction of the pulse duration.
pub const DEFAULT_SIGMA_FRACTION: f64 = 0.25;
/// Default DRAG coefficient, in units of the pulse duration.
pub const DEFAULT_DRAG: f64 = 0.5;

/// Pulse envelope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseShape {
    Ideal,
    Square,
    Gaussian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma_s: Option<f64>,
    },
    GaussianDrag {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma_s: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        drag_coefficient: Option<f64>,
    },
}

impl PulseShape {
    pub fn gaussian() -> Self {
        PulseShape::Gaussian { sigma_s: None }
    }

    pub fn drag() -> Self {
        PulseShape::GaussianDrag {
            sigma_s: None,
            drag_coefficient: None,
        }
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self, PulseShape::Ideal)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PulseShape::Ideal => "ideal",
            PulseShape::Square => "square",
            PulseShape::Gaussian { .. } => "gaussian",
            PulseShape::GaussianDrag { .. } => "gaussian_drag",
        }
    }

    /// Gaussian width for a pulse of duration `tau_p`, if the shape has one.
    pub fn sigma(&self, tau_p: f64) -> Option<f64> {
        match self {
            PulseShape::Gaussian { sigma_s } | PulseShape::GaussianDrag { sigma_s, .. } => {
                Some(sigma_s.unwrap_or(DEFAULT_SIGMA_FRACTION * tau_p))
            }
            _ => None,
        }
    }

    /// DRAG coefficient (zero for non-DRAG shapes).
    pub fn drag_coefficient(&self) -> f64 {
        match self {
            PulseShape::GaussianDrag {
                drag_coefficient, ..
            } => drag_coefficient.unwrap_or(DEFAULT_DRAG),
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let PulseShape::Gaussian { sigma_s: Some(s) }
        | PulseShape::GaussianDrag {
            sigma_s: Some(s), ..
        } = self
        {
            if !(s.is_finite() && *s > 0.0) {
                return Err(invalid("sigma_s", format!("must be positive, got {s}")));
            }
        }
        if let PulseShape::GaussianDrag {
            drag_coefficient: Some(b),
            ..
        } = self
        {
            if !b.is_finite() {
                return Err(invalid("drag_coefficient", "must be finite"));
            }
        }
        Ok(())
    }
}

/// A single pulse: rotation by `flip_angle` about the equatorial axis at
/// `phase`, lasting `duration` (zero for ideal pulses).
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSpec {
    pub phase: f64,
    pub flip_angle: f64,
    pub duration: f64,
    pub shape: PulseShape,
}

/// In-phase and quadrature drive rates `(ω_I(t), ω_Q(t))` in rad/s.
///
/// The in-phase part integrates to `theta` over `[0, tau_p]`. Gaussians are
/// truncated to the window and rescaled so the truncated area is exact. The
/// DRAG quadrature is `β τ_p dω_I/dt`.
pub fn envelope_amplitude(shape: &PulseShape, theta: f64, tau_p: f64, t: f64) -> Result<(f64, f64)> {
    if shape.is_ideal() {
        return Err(Error::NoEnvelope);
    }
    if !(tau_p > 0.0) {
        return Err(invalid("tau_p", "bounded pulses need a positive duration"));
    }
    if !(0.0..=tau_p).contains(&t) {
        return Err(Error::Domain { t, tau_p });
    }
    shape.validate()?;
    Ok(envelope_unchecked(shape, theta, tau_p, t))
}

pub(crate) fn envelope_unchecked(shape: &PulseShape, theta: f64, tau_p: f64, t: f64) -> (f64, f64) {
    match shape {
        PulseShape::Ideal => (0.0, 0.0),
        PulseShape::Square => (theta / tau_p, 0.0),
        PulseShape::Gaussian { .. } | PulseShape::GaussianDrag { .. } => {
            let sigma = shape.sigma(tau_p).unwrap_or(DEFAULT_SIGMA_FRACTION * tau_p);
            let area = sigma * (2.0 * PI).sqrt() * libm::erf(tau_p / (2.0 * 2f64.sqrt() * sigma));
            let x = t - tau_p / 2.0;
            let wi = theta / area * (-x * x / (2.0 * sigma * sigma)).exp();
            let wq = shape.drag_coefficient() * tau_p * (-x / (sigma * sigma)) * wi;
            (wi, wq)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Segment {
    /// A pulse; its duration and envelope come from the owning sequence.
    Pulse { phase: f64, flip_angle: f64 },
    Delay { duration: f64 },
}

/// A timed single-qubit pulse schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct Sequence {
    pub name: String,
    pub tau_p: f64,
    pub shape: PulseShape,
    pub segments: Vec<Segment>,
}

impl Sequence {
    /// Build a sequence, merging adjacent delays and dropping empty ones.
    pub fn new(name: impl Into<String>, tau_p: f64, shape: PulseShape, segments: Vec<Segment>) -> Result<Self> {
        shape.validate()?;
        if !(tau_p.is_finite() && tau_p >= 0.0) || (!shape.is_ideal() && tau_p == 0.0) {
            return Err(invalid("tau_p", format!("must be positive, got {tau_p}")));
        }
        let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
        for seg in segments {
            match seg {
                Segment::Delay { duration } => {
                    if !(duration.is_finite() && duration >= 0.0) {
                        return Err(invalid("duration", format!("delays must be nonnegative, got {duration}")));
                    }
                    if duration == 0.0 {
                        continue;
                    }
                    if let Some(Segment::Delay { duration: d }) = out.last_mut() {
                        *d += duration;
                    } else {
                        out.push(Segment::Delay { duration });
                    }
                }
                p => out.push(p),
            }
        }
        Ok(Sequence {
            name: name.into(),
            tau_p,
            shape,
            segments: out,
        })
    }

    /// A pure delay.
    pub fn idle(name: impl Into<String>, duration: f64) -> Result<Self> {
        Sequence::new(name, 0.0, PulseShape::Ideal, vec![Segment::Delay { duration }])
    }

    /// Wall-clock length of a pulse segment.
    pub fn pulse_duration(&self) -> f64 {
        if self.shape.is_ideal() {
            0.0
        } else {
            self.tau_p
        }
    }

    pub fn segment_duration(&self, seg: &Segment) -> f64 {
        match seg {
            Segment::Pulse { .. } => self.pulse_duration(),
            Segment::Delay { duration } => *duration,
        }
    }

    /// Total duration `τ_c`.
    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| self.segment_duration(s)).sum()
    }

    /// Number of pulses `K`.
    pub fn pulse_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s, Segment::Pulse { .. }))
            .count()
    }

    /// Pulse phases in temporal order.
    pub fn phases(&self) -> Vec<f64> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Pulse { phase, .. } => Some(*phase),
                _ => None,
            })
            .collect()
    }

    /// Full pulse description for a pulse segment.
    pub fn pulse_spec(&self, seg: &Segment) -> Option<PulseSpec> {
        match seg {
            Segment::Pulse { phase, flip_angle } => Some(PulseSpec {
                phase: *phase,
                flip_angle: *flip_angle,
                duration: self.pulse_duration(),
                shape: self.shape.clone(),
            }),
            Segment::Delay { .. } => None,
        }
    }

    /// `(start, end, phase, flip_angle)` of every pulse; `start == end` for
    /// ideal pulses.
    pub fn pulse_windows(&self) -> Vec<(f64, f64, f64, f64)> {
        let mut t = 0.0;
        let mut out = Vec::new();
        for seg in &self.segments {
            let d = self.segment_duration(seg);
            if let Segment::Pulse { phase, flip_angle } = seg {
                out.push((t, t + d, *phase, *flip_angle));
            }
            t += d;
        }
        out
    }

    /// Segment boundary times, starting at 0 and ending at `τ_c`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut t = 0.0;
        let mut out = vec![0.0];
        for seg in &self.segments {
            t += self.segment_duration(seg);
            out.push(t);
        }
        out
    }

    /// `m` back-to-back copies.
    pub fn repeat(&self, m: usize) -> Sequence {
        let mut segments = Vec::with_capacity(self.segments.len() * m);
        for _ in 0..m {
            segments.extend(self.segments.iter().cloned());
        }
        Sequence::new(self.name.clone(), self.tau_p, self.shape.clone(), segments)
            .expect("repeating a valid sequence stays valid")
    }
}

/// A pair of equal-length schedules for the two colour classes.
#[derive(Clone, Debug, PartialEq)]
pub struct ColoredSchedule {
    pub red: Sequence,
    pub blue: Sequence,
}

impl ColoredSchedule {
    pub fn new(red: Sequence, blue: Sequence) -> Result<Self> {
        let (dr, db) = (red.duration(), blue.duration());
        if (dr - db).abs() > 1e-12 * dr.abs().max(db.abs()) {
            return Err(Error::DurationMismatch(dr, db));
        }
        if red.pulse_count() != blue.pulse_count() {
            return Err(Error::LengthMismatch {
                red: red.pulse_count(),
                blue: blue.pulse_count(),
            });
        }
        Ok(ColoredSchedule { red, blue })
    }

    pub fn duration(&self) -> f64 {
        self.red.duration()
    }

    /// Pulses per colour, `L`.
    pub fn len(&self) -> usize {
        self.red.pulse_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sequence(&self, color: Color) -> &Sequence {
        match color {
            Color::R => &self.red,
            Color::B => &self.blue,
        }
    }
}
