use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::embed::{heavy_hex, path_embeddings, Embedding};
use super::method::{qubit_schedules, schedule_points, Method, MethodKind, MethodSchedule};
use crate::control::DEFAULT_SAMPLES;
use crate::error::{invalid, Error, Result};
use crate::io::ResultRow;
use crate::linalg::C;
use crate::sequence::{PulseShape, QubitGraph, Sequence};
use crate::sim::{
    check_norm, decode_p0, norm_sq, prepare_states, product_state, sample_zeros, task_seed, CycleEvolver,
    DeviceModel, StateSpec,
};

/// Registers up to this size are propagated with a dense cycle unitary.
const DENSE_MAX_QUBITS: usize = 8;

/// Reference pulse length, s.
pub const DEFAULT_TAU_P_S: f64 = 5.69e-8;
/// Crosstalk strength `J τ_p` of the default device, rad.
pub const DEFAULT_J_TAU_P: f64 = 5e-3;
/// Spread of the static `b^Z` detunings as a fraction of `J`.
pub const DEFAULT_BZ_FRACTION: f64 = 0.1;

/// Uniform `J` on every edge, `b^Z` drawn uniformly in `±fraction·J`.
pub fn crosstalk_device(graph: QubitGraph, tau_p_s: f64, j_tau_p: f64, bz_fraction: f64, seed: u64) -> Result<DeviceModel> {
    if !(tau_p_s > 0.0) {
        return Err(invalid("tau_p_s", "must be positive"));
    }
    let j = j_tau_p / tau_p_s;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields = (0..graph.n)
        .map(|_| [0.0, 0.0, bz_fraction * j * rng.gen_range(-1.0..=1.0)])
        .collect();
    let device = DeviceModel {
        couplings: vec![j; graph.edges.len()],
        fields,
        graph,
        tau_p_s,
    };
    device.validate()?;
    Ok(device)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DurationPolicy {
    /// Pulses per qubit at the last point.
    pub target_pulses: usize,
    /// Requested spacing between points, in pulses.
    pub step_pulses: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatePolicy {
    pub type1: usize,
    pub type2: usize,
}

impl Default for StatePolicy {
    fn default() -> Self {
        StatePolicy { type1: 6, type2: 14 }
    }
}

/// Everything needed to reproduce a survival experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub device: DeviceModel,
    pub embeddings: Vec<Embedding>,
    pub methods: Vec<String>,
    pub shape: PulseShape,
    pub durations: DurationPolicy,
    #[serde(default)]
    pub states: StatePolicy,
    pub shots: u64,
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

impl ExperimentPlan {
    pub fn parsed_methods(&self) -> Result<Vec<Method>> {
        self.methods.iter().map(|m| Method::parse(m)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        if self.shots == 0 {
            return Err(invalid("shots", "must be at least 1"));
        }
        if self.embeddings.is_empty() {
            return Err(invalid("embeddings", "none given"));
        }
        for e in &self.embeddings {
            if e.vertices.iter().any(|&v| v >= self.device.n()) {
                return Err(Error::Data(format!("embedding {} leaves the device", e.id)));
            }
        }
        let methods = self.parsed_methods()?;
        let mut labels: Vec<&str> = methods.iter().map(|m| m.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Data("duplicate method labels".into()));
        }
        self.schedules().map(|_| ())
    }

    pub fn schedules(&self) -> Result<Vec<MethodSchedule>> {
        schedule_points(
            &self.parsed_methods()?,
            self.device.tau_p_s,
            &self.shape,
            self.durations.target_pulses,
            self.durations.step_pulses,
        )
    }
}

/// Crosstalk-dominant heavy-hex device with `count` four-qubit path
/// embeddings comparing IDLE, SIM-XY4-2 and CR-XY4 with square pulses.
pub fn default_plan(seed: u64) -> Result<ExperimentPlan> {
    let graph = heavy_hex(2, 9)?;
    let device = crosstalk_device(graph, DEFAULT_TAU_P_S, DEFAULT_J_TAU_P, DEFAULT_BZ_FRACTION, task_seed(seed, &["device"]))?;
    let embeddings = path_embeddings(&device.graph, 4, 5)?;
    Ok(ExperimentPlan {
        device,
        embeddings,
        methods: vec!["IDLE".into(), "SIM-XY4-2".into(), "CR-XY4".into()],
        shape: PulseShape::Square,
        durations: DurationPolicy {
            target_pulses: 160,
            step_pulses: 8,
        },
        states: StatePolicy::default(),
        shots: 1000,
        seed,
        samples: DEFAULT_SAMPLES,
    })
}

/// A cell that could not be simulated.
#[derive(Clone, Debug, PartialEq)]
pub struct CellFailure {
    pub method: String,
    pub embedding_id: String,
    /// `*` when the whole (method, embedding) group failed.
    pub state_id: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<CellFailure>,
}

fn dense_apply(u: &DMatrix<C>, psi: &[C]) -> Vec<C> {
    (u * DVector::from_column_slice(psi)).as_slice().to_vec()
}

struct Group<'a> {
    plan: &'a ExperimentPlan,
    schedule: &'a MethodSchedule,
    embedding: &'a Embedding,
    states: &'a [StateSpec],
}

impl Group<'_> {
    fn sequences(&self, device: &DeviceModel) -> Result<Vec<Sequence>> {
        let m = &self.schedule.method;
        if m.is_idle() {
            let idle = Sequence::idle(m.label.clone(), self.schedule.cycle_duration_s)?;
            return Ok(vec![idle; device.n()]);
        }
        let cycle = m.cycle(self.plan.device.tau_p_s, &self.plan.shape)?;
        if let MethodKind::Sim { .. } = m.kind {
            return Ok(vec![cycle.red; device.n()]);
        }
        let graph = device.graph.two_color()?;
        let coloring = graph.coloring.expect("two_color sets a colouring");
        Ok(qubit_schedules(&cycle, &coloring))
    }

    fn run(&self) -> std::result::Result<Vec<Vec<std::result::Result<ResultRow, String>>>, String> {
        let device = self.plan.device.restrict(&self.embedding.vertices).map_err(|e| e.to_string())?;
        let seqs = self.sequences(&device).map_err(|e| e.to_string())?;
        let refs: Vec<&Sequence> = seqs.iter().collect();
        let ev = CycleEvolver::new(&device, &refs, self.plan.samples).map_err(|e| e.to_string())?;
        let dense = (device.n() <= DENSE_MAX_QUBITS).then(|| ev.cycle_unitary());
        let method = &self.schedule.method.label;
        let emb = &self.embedding.id;
        Ok(self
            .states
            .par_iter()
            .map(|state| {
                let mut psi = product_state(&state.poles);
                let n0 = norm_sq(&psi);
                let mut done = 0usize;
                let mut out = Vec::with_capacity(self.schedule.points.len());
                for pt in &self.schedule.points {
                    while done < pt.repetitions {
                        match &dense {
                            Some(u) => psi = dense_apply(u, &psi),
                            None => ev.cycle(&mut psi),
                        }
                        done += 1;
                    }
                    let t = pt.duration_s;
                    let cell = check_norm(n0, &psi, t, ev.steps() * done)
                        .map(|_| {
                            let p = decode_p0(&state.poles, &psi);
                            let seed = task_seed(
                                self.plan.seed,
                                &[method, emb, &state.id, &pt.repetitions.to_string()],
                            );
                            let zeros = sample_zeros(p, self.plan.shots, seed);
                            ResultRow {
                                method: method.clone(),
                                embedding_id: emb.clone(),
                                state_id: state.id.clone(),
                                duration_s: t,
                                pulses: pt.pulses,
                                shots: self.plan.shots,
                                zeros,
                                p0: zeros as f64 / self.plan.shots as f64,
                            }
                        })
                        .map_err(|e| e.to_string());
                    out.push(cell);
                }
                out
            })
            .collect())
    }
}

/// States used for registers of `n` qubits.
pub fn plan_states(plan: &ExperimentPlan, n: usize) -> Vec<StateSpec> {
    prepare_states(
        n,
        plan.states.type1,
        plan.states.type2,
        task_seed(plan.seed, &["states", &n.to_string()]),
    )
}

/// Run every (method, embedding, state, duration) cell. Groups are visited
/// in canonical order (method label, then embedding id) and `sink` receives
/// each finished group's rows, so output can be written incrementally;
/// states within a group run in parallel.
pub fn run_experiment_with(
    plan: &ExperimentPlan,
    mut sink: impl FnMut(&[ResultRow]) -> Result<()>,
) -> Result<Dataset> {
    plan.validate()?;
    let mut schedules = plan.schedules()?;
    schedules.sort_by(|a, b| a.method.label.cmp(&b.method.label));
    let mut embeddings: Vec<&Embedding> = plan.embeddings.iter().collect();
    embeddings.sort_by(|a, b| a.id.cmp(&b.id));
    let mut data = Dataset::default();
    for sched in &schedules {
        for emb in &embeddings {
            let states = plan_states(plan, emb.n());
            let group = Group {
                plan,
                schedule: sched,
                embedding: emb,
                states: &states,
            };
            let fail = |state_id: &str, message: String| CellFailure {
                method: sched.method.label.clone(),
                embedding_id: emb.id.clone(),
                state_id: state_id.to_string(),
                message,
            };
            let mut rows = Vec::new();
            match group.run() {
                Ok(per_state) => {
                    for (state, cells) in states.iter().zip(per_state) {
                        for cell in cells {
                            match cell {
                                Ok(r) => rows.push(r),
                                Err(m) => data.failures.push(fail(&state.id, m)),
                            }
                        }
                    }
                }
                Err(m) => data.failures.push(fail("*", m)),
            }
            sink(&rows)?;
            data.rows.extend(rows);
        }
    }
    Ok(data)
}

pub fn run_experiment(plan: &ExperimentPlan) -> Result<Dataset> {
    run_experiment_with(plan, |_| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_plan() -> ExperimentPlan {
        let graph = QubitGraph::path(3);
        let device = crosstalk_device(graph, 1.0, 0.02, 0.1, 1).unwrap();
        ExperimentPlan {
            device,
            embeddings: vec![Embedding {
                id: "n2-0".into(),
                vertices: vec![0, 1],
            }],
            methods: vec!["SIM-XY4-2".into(), "CR-XY4".into()],
            shape: PulseShape::Square,
            durations: DurationPolicy {
                target_pulses: 8,
                step_pulses: 4,
            },
            states: StatePolicy { type1: 2, type2: 0 },
            shots: 100,
            seed: 9,
            samples: 256,
        }
    }

    #[test]
    fn cell_count() {
        let d = run_experiment(&tiny_plan()).unwrap();
        assert!(d.failures.is_empty(), "{:?}", d.failures);
        // 1 embedding × 2 states × 2 methods × 3 durations
        assert_eq!(d.rows.len(), 12);
        assert_eq!(d.rows[0].method, "CR-XY4");
    }

    #[test]
    fn deterministic() {
        let a = run_experiment(&tiny_plan()).unwrap();
        let b = run_experiment(&tiny_plan()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn failures_are_recorded() {
        let mut p = tiny_plan();
        p.embeddings.push(Embedding {
            id: "n3-tri".into(),
            vertices: vec![0, 1, 2],
        });
        // a triangle cannot be two-coloured
        p.device.graph.edges.push([0, 2]);
        p.device.couplings.push(0.02);
        let d = run_experiment(&p).unwrap();
        // SIM needs no colouring and still runs on the triangle
        assert_eq!(d.rows.len(), 18);
        assert_eq!(d.failures.len(), 1);
        assert_eq!((d.failures[0].method.as_str(), d.failures[0].state_id.as_str()), ("CR-XY4", "*"));
    }

    #[test]
    fn default_plan_validates() {
        let p = default_plan(1).unwrap();
        p.validate().unwrap();
        let s = p.schedules().unwrap();
        assert_eq!(s[1].points.last().unwrap().pulses, 160);
        let json = serde_json::to_string(&p).unwrap();
        let back: ExperimentPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}
