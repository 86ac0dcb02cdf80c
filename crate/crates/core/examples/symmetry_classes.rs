//! Displacement and mirror (anti)symmetries of the staggered control
//! matrices, the structure behind the first-order cancellation.

use crdd::control::{classify_all, control_traces, PropagateOptions, DEFAULT_SYMMETRY_TOL};
use crdd::sequence::{ColoredSchedule, PulseShape};

fn main() -> crdd::Result<()> {
    for name in ["XY4", "UR12"] {
        let s = ColoredSchedule::named(name, name, 1.0, PulseShape::Square)?;
        let tr = control_traces(&[&s.red, &s.blue], PropagateOptions::samples(256))?;
        for (color, t) in ["red", "blue"].iter().zip(&tr) {
            println!("{} {color}", s.label());
            for rep in classify_all(t, DEFAULT_SYMMETRY_TOL)? {
                if rep.mu != "Z" {
                    continue;
                }
                let found: Vec<&str> = rep.checks.iter().filter(|c| c.flag).map(|c| c.relation.as_str()).collect();
                println!("  R^{}{}: {}", rep.mu, rep.alpha, if found.is_empty() { "-".into() } else { found.join(", ") });
            }
        }
    }
    Ok(())
}
