//! Experiment orchestration: embeddings, pulse-normalised data points, the
//! method matrix, parallel simulation and summary tables.

mod embed;
mod method;
mod run;
mod summary;

pub use embed::{all_paths, embedding_size, heavy_hex, path_embeddings, Embedding};
pub use method::{qubit_schedules, schedule_points, Method, MethodKind, MethodSchedule, SchedulePoint};
pub use run::{
    crosstalk_device, default_plan, plan_states, run_experiment, run_experiment_with, CellFailure, Dataset,
    DurationPolicy, ExperimentPlan, StatePolicy, DEFAULT_BZ_FRACTION, DEFAULT_J_TAU_P, DEFAULT_TAU_P_S,
};
pub use summary::{fit_dataset, mean_traces, read_summary, summarize, write_summary, SummaryRow, SUMMARY_HEADER};
