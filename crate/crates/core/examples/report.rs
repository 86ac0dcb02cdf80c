//! Full pipeline on the built-in crosstalk-dominant plan: simulate, fit,
//! summarise and write SVG plots into a directory (default `report-out`).

use std::fs;
use std::path::PathBuf;

use crdd::harness::{default_plan, fit_dataset, run_experiment, summarize};
use crdd::report::render_report;

fn main() -> crdd::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "report-out".into()));
    let plan = default_plan(2024)?;
    let data = run_experiment(&plan)?;
    let fits = fit_dataset(&data.rows)?;
    for row in summarize(&fits)? {
        println!(
            "n={} {:10} median tau {:.3e} s  IQR {:.1e}  SIM/IDLE {}  CR/SIM {}",
            row.n,
            row.method,
            row.median_tau_s,
            row.iqr_tau_s,
            row.ratio_sim_idle.map_or("-".into(), |r| format!("{r:.2}")),
            row.ratio_cr_sim.map_or("-".into(), |r| format!("{r:.2}")),
        );
    }
    fs::create_dir_all(&dir)?;
    for (name, svg) in render_report(&data.rows, Some(&fits), true)? {
        fs::write(dir.join(&name), svg)?;
        println!("wrote {}", dir.join(&name).display());
    }
    Ok(())
}
