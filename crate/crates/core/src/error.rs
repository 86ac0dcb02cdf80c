use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ideal pulses have no continuous envelope")]
    NoEnvelope,

    #[error("time {t} outside pulse window [0, {tau_p}]")]
    Domain { t: f64, tau_p: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown sequence `{0}` (known: XY4, EDD, KDD, UR10, UR12, RGA64c)")]
    UnknownSequence(String),

    #[error("phase list is empty")]
    EmptyPhases,

    #[error("phase lists differ in length: red has {red}, blue has {blue}")]
    LengthMismatch { red: usize, blue: usize },

    #[error("input is not an unpadded staggered schedule: {0}")]
    NotUnpadded(String),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),

    #[error("graph is not bipartite: odd cycle {cycle:?}")]
    NotBipartite { cycle: Vec<usize> },

    #[error("integration failure at t = {t:e}: unitarity defect {defect:e}")]
    IntegrationFailure { t: f64, defect: f64 },

    #[error("control matrix not real at t = {t:e}: imaginary part {imag:e}")]
    NonReal { t: f64, imag: f64 },

    #[error("traces do not share a time grid")]
    GridMismatch,

    #[error("bang-bang trace requires ideal pulses; found shape `{0}`")]
    BoundedPulse(String),

    #[error("symmetry classification needs a uniform grid with an even cell count: {0}")]
    NonUniformGrid(String),

    #[error("{n} qubits exceed the statevector limit of {max}")]
    Capacity { n: usize, max: usize },

    #[error("schedule durations differ across qubits: {0:e} vs {1:e}")]
    DurationMismatch(f64, f64),

    #[error("characteristic time is infinite (gamma = 0)")]
    InfiniteTau,

    #[error("evaluation point {t} lies outside data range [{lo}, {hi}]")]
    Extrapolation { t: f64, lo: f64, hi: f64 },

    #[error("cannot align methods at {target} pulses; the cycle pulse counts have least common multiple {lcm}")]
    Alignment { target: u64, lcm: u64 },

    #[error("invalid input data: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
