//! A small seeded survival experiment: two embeddings on a heavy-hex
//! device, three methods, results streamed to standard output as CSV.

use crdd::harness::{crosstalk_device, heavy_hex, path_embeddings, run_experiment_with, DurationPolicy, ExperimentPlan, StatePolicy};
use crdd::io::ResultsWriter;
use crdd::sequence::PulseShape;

fn main() -> crdd::Result<()> {
    let graph = heavy_hex(2, 9)?;
    let device = crosstalk_device(graph, 5.69e-8, 5e-3, 0.1, 11)?;
    let embeddings = path_embeddings(&device.graph, 3, 2)?;
    let plan = ExperimentPlan {
        device,
        embeddings,
        methods: vec!["IDLE".into(), "SIM-XY4-2".into(), "CR-XY4".into()],
        shape: PulseShape::Square,
        durations: DurationPolicy {
            target_pulses: 64,
            step_pulses: 16,
        },
        states: StatePolicy { type1: 2, type2: 2 },
        shots: 1000,
        seed: 11,
        samples: 256,
    };
    let stdout = std::io::stdout();
    let mut w = ResultsWriter::new(stdout.lock())?;
    let data = run_experiment_with(&plan, |rows| w.append(rows))?;
    eprintln!("{} rows, {} failures", data.rows.len(), data.failures.len());
    Ok(())
}
