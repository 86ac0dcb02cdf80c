//! Control matrix R(t) of a square-pulse XY4 cycle, sampled at a few times,
//! and the 1-local error matrix it integrates to.

use crdd::control::{chi1, control_trace, AXES};
use crdd::sequence::{build_named, PulseShape};

fn main() -> crdd::Result<()> {
    let seq = build_named("XY4", 1.0, PulseShape::Square)?;
    let tr = control_trace(&seq, 256)?;
    for t in [0.0, 0.5, 1.0, 2.0, 3.0, 4.0] {
        let r = tr.r[tr.node_at(t)];
        println!("t = {t:.1} tau_p  R_Z. = [{:+.3} {:+.3} {:+.3}]", r[(2, 0)], r[(2, 1)], r[(2, 2)]);
    }
    let m = chi1(&tr);
    println!("\nchi1 (units of tau_p):");
    for i in 0..3 {
        println!("  {}: [{:+.4} {:+.4} {:+.4}]", AXES[i], m.values[(i, 0)], m.values[(i, 1)], m.values[(i, 2)]);
    }
    Ok(())
}
