//! Exact statevector survival of a four-qubit chain under static ZZ
//! crosstalk: free evolution, simultaneous XY4 and staggered XY4.

use crdd::sequence::{sim_k, ColoredSchedule, PulseShape, QubitGraph, Sequence};
use crdd::sim::{decode_p0, evolve, product_state, DeviceModel, Pole};

fn main() -> crdd::Result<()> {
    let tau_p = 5.69e-8;
    let j = 5e-3 / tau_p;
    let dev = DeviceModel {
        graph: QubitGraph::path(4),
        couplings: vec![j; 3],
        fields: vec![[0.0; 3]; 4],
        tau_p_s: tau_p,
    };
    let poles = [Pole::PlusX; 4];
    let psi0 = product_state(&poles);

    let sim = sim_k("XY4", tau_p, 2, PulseShape::Square)?;
    let cr = ColoredSchedule::named("XY4", "XY4", tau_p, PulseShape::Square)?;
    let idle = Sequence::idle("IDLE", sim.duration())?;
    let alternate = |a: &Sequence, b: &Sequence| [a.clone(), b.clone(), a.clone(), b.clone()];
    let methods = [
        ("IDLE", [idle.clone(), idle.clone(), idle.clone(), idle]),
        ("SIM-XY4-2", alternate(&sim, &sim)),
        ("CR-XY4", alternate(&cr.red, &cr.blue)),
    ];
    println!("cycles  {:>10} {:>10} {:>10}", methods[0].0, methods[1].0, methods[2].0);
    for m in [0, 5, 10, 20, 40] {
        let mut row = format!("{m:6}");
        for (_, scheds) in &methods {
            let refs: Vec<&Sequence> = scheds.iter().collect();
            let psi = evolve(&dev, &refs, m, &psi0, 256)?;
            row.push_str(&format!(" {:10.6}", decode_p0(&poles, &psi)));
        }
        println!("{row}");
    }
    Ok(())
}
