use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::catalog::{canonical_name, catalog_phases};
use super::{ColoredSchedule, PulseShape, Segment, Sequence};
use crate::error::{invalid, Error, Result};
use crate::linalg::lcm;

/// How extra delay is distributed around staggered pulses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Padding {
    Symmetric,
    Asymmetric,
}

impl Padding {
    pub fn suffix(self) -> char {
        match self {
            Padding::Symmetric => 'S',
            Padding::Asymmetric => 'A',
        }
    }
}

fn delay(duration: f64) -> Segment {
    Segment::Delay { duration }
}

/// One pulse occupying a window of `tau_p`; an ideal pulse sits at its centre.
fn pulse_block(phase: f64, tau_p: f64, shape: &PulseShape, out: &mut Vec<Segment>) {
    let p = Segment::Pulse {
        phase,
        flip_angle: PI,
    };
    if shape.is_ideal() {
        out.push(delay(tau_p / 2.0));
        out.push(p);
        out.push(delay(tau_p / 2.0));
    } else {
        out.push(p);
    }
}

fn check_delay(tau_d: f64) -> Result<()> {
    if !(tau_d.is_finite() && tau_d >= 0.0) {
        return Err(invalid("tau_d", format!("must be nonnegative, got {tau_d}")));
    }
    Ok(())
}

fn k_delay(k: u32, tau_p: f64) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    Ok((k - 1) as f64 * tau_p)
}

pub(super) fn sim_variant_named(
    name: &str,
    phases: &[f64],
    tau_p: f64,
    tau_d: f64,
    shape: PulseShape,
) -> Result<Sequence> {
    if phases.is_empty() {
        return Err(Error::EmptyPhases);
    }
    check_delay(tau_d)?;
    let mut segs = Vec::with_capacity(phases.len() * 4);
    for &phi in phases {
        pulse_block(phi, tau_p, &shape, &mut segs);
        segs.push(delay(tau_d));
    }
    Sequence::new(name, tau_p, shape, segs)
}

/// Simultaneous DD: every slot is a pulse followed by a delay `tau_d`.
pub fn sim_variant(phases: &[f64], tau_p: f64, tau_d: f64, shape: PulseShape) -> Result<Sequence> {
    sim_variant_named("SIM", phases, tau_p, tau_d, shape)
}

/// `SIM-<name>-k` for a catalog sequence (`tau_d = (k−1) tau_p`).
pub fn sim_k(name: &str, tau_p: f64, k: u32, shape: PulseShape) -> Result<Sequence> {
    let canon = canonical_name(name)?;
    let label = if k == 1 {
        format!("SIM-{canon}")
    } else {
        format!("SIM-{canon}-{k}")
    };
    sim_variant_named(&label, &catalog_phases(canon)?, tau_p, k_delay(k, tau_p)?, shape)
}

/// Repeat two phase lists so both reach the least common multiple length.
pub fn match_lengths(a: &[f64], b: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyPhases);
    }
    let l = lcm(a.len() as u64, b.len() as u64) as usize;
    let rep = |x: &[f64]| x.iter().cycle().take(l).copied().collect::<Vec<_>>();
    Ok((rep(a), rep(b)))
}

fn cr_from_phases(
    red_name: String,
    blue_name: String,
    red: &[f64],
    blue: &[f64],
    tau_p: f64,
    tau_d: f64,
    mode: Padding,
    shape: &PulseShape,
) -> Result<ColoredSchedule> {
    if red.is_empty() || blue.is_empty() {
        return Err(Error::EmptyPhases);
    }
    if red.len() != blue.len() {
        return Err(Error::LengthMismatch {
            red: red.len(),
            blue: blue.len(),
        });
    }
    check_delay(tau_d)?;
    let fp = delay(tau_p);
    let mut rs = Vec::new();
    let mut bs = Vec::new();
    for (&pr, &pb) in red.iter().zip(blue) {
        match mode {
            Padding::Symmetric => {
                rs.push(delay(tau_d / 2.0));
                rs.push(fp.clone());
                rs.push(delay(tau_d));
                pulse_block(pr, tau_p, shape, &mut rs);
                rs.push(delay(tau_d / 2.0));

                bs.push(delay(tau_d / 2.0));
                pulse_block(pb, tau_p, shape, &mut bs);
                bs.push(delay(tau_d));
                bs.push(fp.clone());
                bs.push(delay(tau_d / 2.0));
            }
            Padding::Asymmetric => {
                rs.push(delay(tau_d));
                rs.push(fp.clone());
                rs.push(delay(tau_d));
                pulse_block(pr, tau_p, shape, &mut rs);

                bs.push(delay(tau_d));
                pulse_block(pb, tau_p, shape, &mut bs);
                bs.push(delay(tau_d));
                bs.push(fp.clone());
            }
        }
    }
    ColoredSchedule::new(
        Sequence::new(red_name, tau_p, shape.clone(), rs)?,
        Sequence::new(blue_name, tau_p, shape.clone(), bs)?,
    )
}

/// Crosstalk-robust staggering: red slots are (delay `tau_p`, pulse), blue
/// slots are (pulse, delay `tau_p`), so cross-colour pulses never overlap.
pub fn cr_variant(red: &[f64], blue: &[f64], tau_p: f64, shape: PulseShape) -> Result<ColoredSchedule> {
    cr_from_phases("CR-R".into(), "CR-B".into(), red, blue, tau_p, 0.0, Padding::Symmetric, &shape)
}

impl ColoredSchedule {
    /// `CR-<name>` or `CR-(<red>,<blue>)` from catalog names, repeating the
    /// shorter sequence to match lengths.
    pub fn named(red: &str, blue: &str, tau_p: f64, shape: PulseShape) -> Result<ColoredSchedule> {
        let (rc, bc) = (canonical_name(red)?, canonical_name(blue)?);
        let (pr, pb) = match_lengths(&catalog_phases(rc)?, &catalog_phases(bc)?)?;
        let label = if rc == bc {
            format!("CR-{rc}")
        } else {
            format!("CR-({rc},{bc})")
        };
        cr_from_phases(
            format!("{label}/R"),
            format!("{label}/B"),
            &pr,
            &pb,
            tau_p,
            0.0,
            Padding::Symmetric,
            &shape,
        )
    }

    /// Base label shared by both colours, e.g. `CR-XY4-2S`.
    pub fn label(&self) -> String {
        let n = &self.red.name;
        n.strip_suffix("/R").unwrap_or(n).to_string()
    }
}

/// Pad an unpadded staggered schedule with `tau_d` of extra delay per slot.
pub fn pad(schedule: &ColoredSchedule, tau_d: f64, mode: Padding) -> Result<ColoredSchedule> {
    check_delay(tau_d)?;
    let (red, blue) = (&schedule.red, &schedule.blue);
    if red.tau_p != blue.tau_p || red.shape != blue.shape {
        return Err(Error::NotUnpadded("colours use different pulses".into()));
    }
    let (pr, pb) = (red.phases(), blue.phases());
    let rebuilt = cr_from_phases(
        red.name.clone(),
        blue.name.clone(),
        &pr,
        &pb,
        red.tau_p,
        0.0,
        Padding::Symmetric,
        &red.shape,
    )?;
    if !same_timing(&rebuilt, schedule) {
        return Err(Error::NotUnpadded(
            "slot layout differs from (delay, pulse) / (pulse, delay)".into(),
        ));
    }
    cr_from_phases(
        red.name.clone(),
        blue.name.clone(),
        &pr,
        &pb,
        red.tau_p,
        tau_d,
        mode,
        &red.shape,
    )
}

fn same_timing(a: &ColoredSchedule, b: &ColoredSchedule) -> bool {
    let eq = |x: &Sequence, y: &Sequence| {
        x.segments.len() == y.segments.len()
            && x.segments.iter().zip(&y.segments).all(|(s, t)| match (s, t) {
                (Segment::Delay { duration: d1 }, Segment::Delay { duration: d2 }) => {
                    (d1 - d2).abs() <= 1e-12 * d1.abs().max(d2.abs()).max(f64::MIN_POSITIVE)
                }
                (
                    Segment::Pulse { flip_angle: f1, .. },
                    Segment::Pulse { flip_angle: f2, .. },
                ) => f1 == f2,
                _ => false,
            })
    };
    eq(&a.red, &b.red) && eq(&a.blue, &b.blue)
}

/// `CR-...-k_S` / `k_A` padding with `tau_d = (k−1) tau_p`; `k = 1` returns
/// the input unchanged.
pub fn pad_k(schedule: &ColoredSchedule, k: u32, mode: Padding) -> Result<ColoredSchedule> {
    let tau_d = k_delay(k, schedule.red.tau_p)?;
    let mut out = pad(schedule, tau_d, mode)?;
    if k > 1 {
        let label = format!("{}-{}{}", schedule.label(), k, mode.suffix());
        out.red.name = format!("{label}/R");
        out.blue.name = format!("{label}/B");
    }
    Ok(out)
}

/// Bang-bang pair: red gets `(f_d, P)` slots, blue gets the time-symmetric
/// `√f_d P f_d P ... P √f_d`.
pub fn ideal_symmetric_pair(red: &[f64], blue: &[f64], tau_d: f64) -> Result<ColoredSchedule> {
    if red.is_empty() || blue.is_empty() {
        return Err(Error::EmptyPhases);
    }
    if red.len() != blue.len() {
        return Err(Error::LengthMismatch {
            red: red.len(),
            blue: blue.len(),
        });
    }
    check_delay(tau_d)?;
    let pulse = |phase| Segment::Pulse {
        phase,
        flip_angle: PI,
    };
    let mut rs = Vec::new();
    for &p in red {
        rs.push(delay(tau_d));
        rs.push(pulse(p));
    }
    let mut bs = vec![delay(tau_d / 2.0)];
    for (i, &p) in blue.iter().enumerate() {
        if i > 0 {
            bs.push(delay(tau_d));
        }
        bs.push(pulse(p));
    }
    bs.push(delay(tau_d / 2.0));
    ColoredSchedule::new(
        Sequence::new("ASYM/R", 0.0, PulseShape::Ideal, rs)?,
        Sequence::new("SYM/B", 0.0, PulseShape::Ideal, bs)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::build_named;
    use approx::assert_relative_eq;

    fn xy4() -> Vec<f64> {
        catalog_phases("XY4").unwrap()
    }

    fn centres(s: &Sequence) -> Vec<f64> {
        s.pulse_windows().iter().map(|w| (w.0 + w.1) / 2.0).collect()
    }

    #[test]
    fn sim_durations() {
        let s = sim_k("XY4", 1.0, 2, PulseShape::Square).unwrap();
        assert_eq!(s.duration(), 8.0);
        assert_eq!(s.pulse_count(), 4);
        assert_eq!(s.name, "SIM-XY4-2");
        let s1 = sim_variant(&xy4(), 1.0, 0.0, PulseShape::Square).unwrap();
        assert_eq!(s1.duration(), 4.0);
        assert_eq!(s1.segments.len(), 4);
        let ur = sim_k("UR10", 36e-9, 8, PulseShape::drag()).unwrap();
        assert_relative_eq!(ur.duration(), 2.88e-6, max_relative = 1e-12);
        assert!(matches!(sim_variant(&[], 1.0, 0.0, PulseShape::Square), Err(Error::EmptyPhases)));
    }

    #[test]
    fn sim_ideal_matches_bounded_centres() {
        let a = sim_variant(&xy4(), 1.0, 1.0, PulseShape::Square).unwrap();
        let b = sim_variant(&xy4(), 1.0, 1.0, PulseShape::Ideal).unwrap();
        assert_eq!(centres(&a), centres(&b));
        assert_eq!(a.duration(), b.duration());
    }

    #[test]
    fn cr_xy4_timing() {
        let s = cr_variant(&xy4(), &xy4(), 1.0, PulseShape::Square).unwrap();
        assert_eq!(s.duration(), 8.0);
        let b: Vec<f64> = (0..4).map(|j| 0.5 + 2.0 * j as f64).collect();
        let r: Vec<f64> = (0..4).map(|j| 1.5 + 2.0 * j as f64).collect();
        assert_eq!(centres(&s.blue), b);
        assert_eq!(centres(&s.red), r);
        let ideal = cr_variant(&xy4(), &xy4(), 1.0, PulseShape::Ideal).unwrap();
        assert_eq!(centres(&ideal.blue), b);
        assert_eq!(centres(&ideal.red), r);
    }

    #[test]
    fn cr_heterogeneous_and_mismatch() {
        let s = ColoredSchedule::named("xy4", "ur12", 1.0, PulseShape::Square).unwrap();
        assert_eq!(s.len(), 12);
        assert_eq!(s.duration(), 24.0);
        assert_eq!(s.label(), "CR-(XY4,UR12)");
        match cr_variant(&xy4(), &[0.0; 12], 1.0, PulseShape::Square) {
            Err(Error::LengthMismatch { red: 4, blue: 12 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cr_single_pulse() {
        let s = cr_variant(&[0.0], &[0.0], 1.0, PulseShape::Square).unwrap();
        assert_eq!(s.red.pulse_windows()[0].0 - s.blue.pulse_windows()[0].0, 1.0);
    }

    #[test]
    fn padding() {
        let s = ColoredSchedule::named("XY4", "XY4", 1.0, PulseShape::Square).unwrap();
        let p = pad_k(&s, 2, Padding::Symmetric).unwrap();
        assert_eq!(p.duration(), 16.0);
        assert_eq!(p.label(), "CR-XY4-2S");
        assert_eq!(pad_k(&s, 1, Padding::Asymmetric).unwrap(), s);
        let tp = 49.7777777777e-9;
        let s2 = ColoredSchedule::named("XY4", "XY4", tp, PulseShape::Square).unwrap();
        let p16 = pad_k(&s2, 16, Padding::Symmetric).unwrap();
        assert_relative_eq!(p16.duration(), 2.0 * 16.0 * 4.0 * tp, max_relative = 1e-12);
        assert!(pad(&s, -1.0, Padding::Symmetric).is_err());
        assert!(matches!(pad(&p, 1.0, Padding::Symmetric), Err(Error::NotUnpadded(_))));
    }

    #[test]
    fn ideal_pair_layout() {
        let p = ideal_symmetric_pair(&xy4(), &xy4(), 1.0).unwrap();
        assert_eq!(p.duration(), 4.0);
        assert_eq!(centres(&p.red), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(centres(&p.blue), vec![0.5, 1.5, 2.5, 3.5]);
    }

    #[test]
    fn build_named_back_to_back() {
        let s = build_named("xy4", 5.69e-8, PulseShape::Square).unwrap();
        assert_eq!(s.pulse_count(), 4);
        assert_relative_eq!(s.duration(), 4.0 * 5.69e-8);
        assert_eq!(s.name, "XY4");
    }
}
