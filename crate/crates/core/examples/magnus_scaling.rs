//! Cycle error against coupling strength for two qubits: linear for the
//! simultaneous sequence, quadratic once staggering removes the first
//! Magnus term.

use crdd::sequence::{sim_k, ColoredSchedule, PulseShape, QubitGraph, Sequence};
use crdd::sim::{CycleEvolver, DeviceModel};

fn cycle_error(seqs: [&Sequence; 2], j: f64) -> crdd::Result<f64> {
    let dev = |j: f64| DeviceModel {
        graph: QubitGraph::path(2),
        couplings: vec![j],
        fields: vec![[0.0; 3]; 2],
        tau_p_s: seqs[0].tau_p,
    };
    let u0 = CycleEvolver::new(&dev(0.0), &seqs, 256)?.cycle_unitary();
    let u = CycleEvolver::new(&dev(j), &seqs, 256)?.cycle_unitary();
    let ov = (u0.adjoint() * &u).trace();
    Ok((u / (ov / ov.norm()) - u0).norm())
}

fn main() -> crdd::Result<()> {
    let sim = sim_k("XY4", 1.0, 1, PulseShape::Ideal)?;
    let cr = ColoredSchedule::named("XY4", "XY4", 1.0, PulseShape::Square)?;
    println!("{:>10} {:>12} {:>12}", "J tau_c", "SIM-XY4", "CR-XY4");
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..5 {
        let jt = 1e-4 * 10f64.powf(0.5 * k as f64);
        let a = cycle_error([&sim, &sim], jt / sim.duration())?;
        let b = cycle_error([&cr.red, &cr.blue], jt / cr.duration())?;
        print!("{jt:10.1e} {a:12.3e} {b:12.3e}");
        if let Some((pa, pb)) = prev {
            print!("   slopes {:.2} {:.2}", (a / pa).log10() / 0.5, (b / pb).log10() / 0.5);
        }
        println!();
        prev = Some((a, b));
    }
    Ok(())
}
