//! Catalog sequences and their SIM-k forms, printed as slot tables.

use crdd::io::{to_json, SequenceFile};
use crdd::sequence::{build_named, sim_k, PulseShape, CATALOG};

fn main() -> crdd::Result<()> {
    let tau_p = 5.69e-8;
    for name in CATALOG {
        let seq = build_named(name, tau_p, PulseShape::Square)?;
        let phases: Vec<String> = seq.phases().iter().take(8).map(|p| format!("{:.0}°", p.to_degrees())).collect();
        println!(
            "{name:7} {:3} pulses, {:.3} µs, first phases [{}]",
            seq.pulse_count(),
            seq.duration() * 1e6,
            phases.join(" ")
        );
    }

    let sim = sim_k("XY4", tau_p, 2, PulseShape::drag())?;
    println!("\n{} lasts {:.1} tau_p", sim.name, sim.duration() / tau_p);
    print!("{}", to_json(&SequenceFile::from(&sim))?);
    Ok(())
}
