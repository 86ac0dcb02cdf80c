//! Which 1-local errors survive staggering: CR-XY4 keeps (X,Z),(Y,Z),
//! CR-UR10 keeps the XY block, and UR10 leaves roughly 1.8× more at equal
//! pulse count.

use crdd::control::{chi1, control_traces, ErrorMatrix, PropagateOptions, AXES};
use crdd::sequence::{ColoredSchedule, PulseShape};

fn chi1_red(name: &str, reps: usize) -> crdd::Result<ErrorMatrix> {
    let s = ColoredSchedule::named(name, name, 1.0, PulseShape::Square)?;
    let red = s.red.repeat(reps);
    let blue = s.blue.repeat(reps);
    let tr = control_traces(&[&red, &blue], PropagateOptions::samples(256))?;
    Ok(chi1(&tr[0]))
}

fn main() -> crdd::Result<()> {
    let xy4 = chi1_red("XY4", 5)?;
    let ur10 = chi1_red("UR10", 2)?;
    for (name, m) in [("CR-XY4 x5", &xy4), ("CR-UR10 x2", &ur10)] {
        println!("{name}:");
        for i in 0..3 {
            let row: Vec<String> = (0..3).map(|j| format!("{:+.3}", m.values[(i, j)])).collect();
            println!("  {} [{}]", AXES[i], row.join(" "));
        }
    }
    println!("max ratio UR10/XY4 at 20 pulses: {:.3}", ur10.max_abs() / xy4.max_abs());
    Ok(())
}
