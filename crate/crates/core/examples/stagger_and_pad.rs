//! Crosstalk-robust staggering of two colours, then symmetric and
//! asymmetric padding.

use crdd::sequence::{pad_k, ColoredSchedule, Padding, PulseShape, Segment, Sequence};

fn layout(seq: &Sequence) -> String {
    seq.segments
        .iter()
        .map(|s| match s {
            Segment::Pulse { phase, .. } => format!("P{:.0}", phase.to_degrees()),
            Segment::Delay { duration } => format!("d{:.1}", duration / seq.tau_p),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> crdd::Result<()> {
    let cr = ColoredSchedule::named("XY4", "XY4", 1.0, PulseShape::Square)?;
    println!("{} ({} tau_p)", cr.label(), cr.duration());
    println!("  red : {}", layout(&cr.red));
    println!("  blue: {}", layout(&cr.blue));

    for (k, mode) in [(2, Padding::Symmetric), (2, Padding::Asymmetric), (4, Padding::Symmetric)] {
        let p = pad_k(&cr, k, mode)?;
        println!("{} ({} tau_p)", p.label(), p.duration());
        println!("  red : {}", layout(&p.red));
        println!("  blue: {}", layout(&p.blue));
    }

    // mixed sequences repeat the shorter one to a common length
    let mixed = ColoredSchedule::named("XY4", "UR12", 1.0, PulseShape::Square)?;
    println!("{}: {} red pulses, {} blue pulses", mixed.label(), mixed.red.pulse_count(), mixed.blue.pulse_count());
    Ok(())
}
