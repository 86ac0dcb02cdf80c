use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::lcm;
use crate::sequence::{canonical_name, pad_k, sim_k, Color, ColoredSchedule, Padding, PulseShape, Sequence};

/// What a method label asks for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MethodKind {
    /// Free evolution, timed like `partner` (or the first pulsed method).
    Idle { partner: Option<String> },
    /// The same sequence on every qubit with `τ_d = (k−1)τ_p`.
    Sim { base: String, k: u32 },
    /// Staggered red/blue sequences, optionally padded.
    Cr {
        red: String,
        blue: String,
        padding: Option<(u32, Padding)>,
    },
}

/// A parsed method label such as `SIM-XY4-2`, `CR-UR10`, `CR-(XY4,UR12)`,
/// `CR-XY4-4A` or `IDLE`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Method {
    pub label: String,
    pub kind: MethodKind,
}

fn parse_k(s: &str, what: &str) -> Result<u32> {
    match s.parse::<u32>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(Error::Data(format!("bad {what} in method label: {s:?}"))),
    }
}

impl Method {
    pub fn parse(label: &str) -> Result<Method> {
        let upper = label.trim().to_ascii_uppercase();
        let trimmed = label.trim();
        let kind = if upper == "IDLE" {
            MethodKind::Idle { partner: None }
        } else if upper.starts_with("IDLE-") {
            let partner = Method::parse(&trimmed[5..])?;
            if matches!(partner.kind, MethodKind::Idle { .. }) {
                return Err(Error::Data(format!("IDLE partner must be pulsed: {label}")));
            }
            MethodKind::Idle {
                partner: Some(partner.label),
            }
        } else if upper.starts_with("SIM-") {
            let rest = &trimmed[4..];
            match rest.split_once('-') {
                Some((b, k)) => MethodKind::Sim {
                    base: canonical_name(b)?.to_string(),
                    k: parse_k(k, "SIM spacing")?,
                },
                None => MethodKind::Sim {
                    base: canonical_name(rest)?.to_string(),
                    k: 1,
                },
            }
        } else if upper.starts_with("CR-") {
            let rest = &trimmed[3..];
            let (names, tail) = if let Some(inner) = rest.strip_prefix('(') {
                let close = inner
                    .find(')')
                    .ok_or_else(|| Error::Data(format!("unbalanced parenthesis in {label}")))?;
                let (a, b) = inner[..close]
                    .split_once(',')
                    .ok_or_else(|| Error::Data(format!("expected CR-(A,B) in {label}")))?;
                ((a.trim(), b.trim()), &inner[close + 1..])
            } else {
                match rest.split_once('-') {
                    Some((b, _)) => ((b, b), &rest[b.len()..]),
                    None => ((rest, rest), ""),
                }
            };
            let padding = match tail {
                "" => None,
                t => {
                    let t = t
                        .strip_prefix('-')
                        .ok_or_else(|| Error::Data(format!("bad padding suffix in {label}")))?;
                    let (k, mode) = t.split_at(t.len().saturating_sub(1));
                    let mode = match mode {
                        "S" | "s" => Padding::Symmetric,
                        "A" | "a" => Padding::Asymmetric,
                        _ => return Err(Error::Data(format!("padding must end in S or A: {label}"))),
                    };
                    Some((parse_k(k, "padding factor")?, mode))
                }
            };
            MethodKind::Cr {
                red: canonical_name(names.0)?.to_string(),
                blue: canonical_name(names.1)?.to_string(),
                padding,
            }
        } else {
            return Err(Error::Data(format!("unknown method label {label:?}")));
        };
        Ok(Method {
            label: canonical_label(&kind),
            kind,
        })
    }

    pub fn is_idle(&self) -> bool {
        matches!(self.kind, MethodKind::Idle { .. })
    }

    /// Catalog sequence the method is built from (`None` for IDLE and
    /// mixed staggering).
    pub fn base(&self) -> Option<&str> {
        match &self.kind {
            MethodKind::Sim { base, .. } => Some(base),
            MethodKind::Cr { red, blue, .. } if red == blue => Some(red),
            _ => None,
        }
    }

    /// One cycle as a colour pair; SIM uses the same sequence for both.
    pub fn cycle(&self, tau_p: f64, shape: &PulseShape) -> Result<ColoredSchedule> {
        match &self.kind {
            MethodKind::Idle { .. } => Err(Error::Data("IDLE has no cycle of its own".into())),
            MethodKind::Sim { base, k } => {
                let s = sim_k(base, tau_p, *k, shape.clone())?;
                Ok(ColoredSchedule {
                    red: s.clone(),
                    blue: s,
                })
            }
            MethodKind::Cr { red, blue, padding } => {
                let s = ColoredSchedule::named(red, blue, tau_p, shape.clone())?;
                match padding {
                    Some((k, mode)) => pad_k(&s, *k, *mode),
                    None => Ok(s),
                }
            }
        }
    }
}

fn canonical_label(kind: &MethodKind) -> String {
    match kind {
        MethodKind::Idle { partner: None } => "IDLE".into(),
        MethodKind::Idle { partner: Some(p) } => format!("IDLE-{p}"),
        MethodKind::Sim { base, k: 1 } => format!("SIM-{base}"),
        MethodKind::Sim { base, k } => format!("SIM-{base}-{k}"),
        MethodKind::Cr { red, blue, padding } => {
            let mut s = if red == blue {
                format!("CR-{red}")
            } else {
                format!("CR-({red},{blue})")
            };
            if let Some((k, mode)) = padding {
                if *k > 1 {
                    s.push_str(&format!("-{k}{}", mode.suffix()));
                }
            }
            s
        }
    }
}

/// Per-qubit schedules for a two-coloured register.
pub fn qubit_schedules(cycle: &ColoredSchedule, coloring: &[Color]) -> Vec<Sequence> {
    coloring
        .iter()
        .map(|c| cycle.sequence(*c).clone())
        .collect()
}

/// One data point of a method.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchedulePoint {
    pub repetitions: usize,
    pub pulses: usize,
    pub duration_s: f64,
}

/// Cycle structure and data points of one method.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodSchedule {
    pub method: Method,
    /// Pulses per qubit per cycle (zero for IDLE).
    pub cycle_pulses: usize,
    pub cycle_duration_s: f64,
    pub points: Vec<SchedulePoint>,
}

/// Pulse-count normalised data points.
///
/// Points sit at `0, s, 2s, …, target_pulses` pulses per qubit, where `s` is
/// the smallest multiple of the least common multiple `L` of the cycle pulse
/// counts that is at least `step_pulses` and divides the target. Every
/// pulsed method therefore applies the same number of pulses at every point.
/// IDLE copies the wall times of its partner.
pub fn schedule_points(
    methods: &[Method],
    tau_p: f64,
    shape: &PulseShape,
    target_pulses: usize,
    step_pulses: usize,
) -> Result<Vec<MethodSchedule>> {
    if methods.is_empty() {
        return Err(invalid("methods", "none given"));
    }
    let mut cycles: Vec<Option<(usize, f64)>> = Vec::with_capacity(methods.len());
    for m in methods {
        cycles.push(if m.is_idle() {
            None
        } else {
            let c = m.cycle(tau_p, shape)?;
            Some((c.red.pulse_count(), c.duration()))
        });
    }
    let l = cycles
        .iter()
        .flatten()
        .fold(1u64, |acc, &(p, _)| lcm(acc, p as u64)) as usize;
    if cycles.iter().all(|c| c.is_none()) {
        return Err(Error::Data("IDLE needs a pulsed method to take its timing from".into()));
    }
    if target_pulses == 0 || target_pulses % l != 0 {
        return Err(Error::Alignment {
            target: target_pulses as u64,
            lcm: l as u64,
        });
    }
    let mut step = l * step_pulses.div_ceil(l).max(1);
    while target_pulses % step != 0 {
        step += l;
    }
    let pulse_grid: Vec<usize> = (0..=target_pulses / step).map(|i| i * step).collect();
    let pulsed_points = |pulses: usize, dur: f64| -> Vec<SchedulePoint> {
        pulse_grid
            .iter()
            .map(|&p| SchedulePoint {
                repetitions: p / pulses,
                pulses: p,
                duration_s: (p / pulses) as f64 * dur,
            })
            .collect()
    };
    let mut out = Vec::with_capacity(methods.len());
    for (m, c) in methods.iter().zip(&cycles) {
        let sched = match c {
            Some((p, d)) => MethodSchedule {
                method: m.clone(),
                cycle_pulses: *p,
                cycle_duration_s: *d,
                points: pulsed_points(*p, *d),
            },
            None => {
                let partner = match &m.kind {
                    MethodKind::Idle { partner: Some(p) } => Method::parse(p)?,
                    _ => methods.iter().find(|x| !x.is_idle()).cloned().expect("checked above"),
                };
                let pc = partner.cycle(tau_p, shape)?;
                let (p, d) = (pc.red.pulse_count(), pc.duration());
                if target_pulses % p != 0 {
                    return Err(Error::Alignment {
                        target: target_pulses as u64,
                        lcm: lcm(l as u64, p as u64),
                    });
                }
                MethodSchedule {
                    method: m.clone(),
                    cycle_pulses: 0,
                    cycle_duration_s: d,
                    points: pulsed_points(p, d)
                        .into_iter()
                        .map(|pt| SchedulePoint { pulses: 0, ..pt })
                        .collect(),
                }
            }
        };
        out.push(sched);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Method {
        Method::parse(s).unwrap()
    }

    #[test]
    fn labels() {
        assert_eq!(m("sim-xy4-2").label, "SIM-XY4-2");
        assert_eq!(m("SIM-kdd").kind, MethodKind::Sim { base: "KDD".into(), k: 1 });
        assert_eq!(m("CR-rga64c").label, "CR-RGA64c");
        assert_eq!(
            m("CR-XY4-4A").kind,
            MethodKind::Cr {
                red: "XY4".into(),
                blue: "XY4".into(),
                padding: Some((4, Padding::Asymmetric))
            }
        );
        assert_eq!(m("cr-(xy4, ur12)").label, "CR-(XY4,UR12)");
        assert_eq!(m("CR-(XY4,UR12)-2S").label, "CR-(XY4,UR12)-2S");
        assert_eq!(m("idle-cr-xy4").label, "IDLE-CR-XY4");
        for bad in ["CR-", "SIM-XY4-0", "CR-XY4-2Q", "FOO", "IDLE-IDLE", "CR-(XY4"] {
            assert!(Method::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn cycle_labels_match() {
        for l in ["CR-XY4", "CR-XY4-2S", "CR-(XY4,UR12)", "SIM-UR10-2"] {
            let c = m(l).cycle(1.0, &PulseShape::Square).unwrap();
            assert_eq!(c.label(), l);
        }
    }

    #[test]
    fn four_sequence_alignment() {
        let methods: Vec<Method> = ["CR-XY4", "CR-UR10", "CR-KDD", "CR-RGA64c"].map(m).to_vec();
        let s = schedule_points(&methods, 1.0, &PulseShape::Square, 320, 1).unwrap();
        for ms in &s {
            let last = ms.points.last().unwrap();
            assert_eq!(last.pulses, 320);
            assert!((last.duration_s - 640.0).abs() < 1e-9);
        }
        let err = schedule_points(&methods, 1.0, &PulseShape::Square, 160, 1).unwrap_err();
        assert!(matches!(err, Error::Alignment { lcm: 320, .. }));
    }

    #[test]
    fn single_method_and_idle() {
        let methods = [m("SIM-XY4-2"), m("IDLE")];
        let s = schedule_points(&methods, 1.0, &PulseShape::Square, 8, 8).unwrap();
        assert_eq!(s[0].points.iter().map(|p| p.repetitions).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(s[1].points[1].pulses, 0);
        assert_eq!(s[1].points[1].duration_s, s[0].points[1].duration_s);
    }

    #[test]
    fn steps_divide_target() {
        let s = schedule_points(&[m("CR-XY4")], 1.0, &PulseShape::Square, 24, 5).unwrap();
        let p: Vec<usize> = s[0].points.iter().map(|x| x.pulses).collect();
        assert_eq!(p, vec![0, 8, 16, 24]);
    }
}
