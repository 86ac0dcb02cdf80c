//! First-order ZZ suppression: staggered schedules pass, the simultaneous
//! one fails with the closed-form χ₂^{ZZ} = 4τ_d + 2τ_p.

use crdd::control::{verify_first_order, PropagateOptions, Target, DEFAULT_TOL};
use crdd::sequence::{pad_k, sim_k, ColoredSchedule, Padding, PulseShape};

fn main() -> crdd::Result<()> {
    let tau_p = 5.69e-8;
    let opts = PropagateOptions::samples(256);
    for (r, b) in [("XY4", "XY4"), ("KDD", "KDD"), ("UR10", "UR10"), ("RGA64c", "RGA64c"), ("XY4", "UR12")] {
        let s = ColoredSchedule::named(r, b, tau_p, PulseShape::drag())?;
        let rep = verify_first_order(Target::Schedule(&s), opts, DEFAULT_TOL)?;
        println!("{:16} {}  max|chi2|/tau_c = {:.1e}", s.label(), verdict(rep.pass), rep.max_residual);
    }
    let cr = ColoredSchedule::named("XY4", "XY4", tau_p, PulseShape::Square)?;
    let padded = pad_k(&cr, 4, Padding::Asymmetric)?;
    let rep = verify_first_order(Target::Schedule(&padded), opts, DEFAULT_TOL)?;
    println!("{:16} {}  max|chi2|/tau_c = {:.1e}", padded.label(), verdict(rep.pass), rep.max_residual);

    let sim = sim_k("XY4", tau_p, 2, PulseShape::Square)?;
    let rep = verify_first_order(Target::Simultaneous(&sim), opts, DEFAULT_TOL)?;
    println!(
        "{:16} {}  failing entries {:?}, chi2_ZZ = {:.4} tau_p (closed form 6)",
        sim.name,
        verdict(rep.pass),
        rep.failures(),
        rep.chi2.values[(2, 2)] / tau_p
    );
    Ok(())
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
