//! Statevector simulation of DD schedules under static `ZZ` couplings and
//! static 1-local fields.
//!
//! Qubit `v` is bit `v` of the basis index, with bit value 0 meaning `|0⟩`
//! (`Z = +1`). The Hamiltonian
//! `H(t) = Σ_v h_v(t)·σ_v + Σ_e J_e Z_u Z_w`, where `h_v` collects the drive
//! and the static field `b_v`, is applied matrix-free.

mod states;

pub use states::{prepare_states, Pole, StateKind, StateSpec};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::control::{plan, Plan};
use crate::error::{invalid, Error, Result};
use crate::linalg::{axis, c, rotation, C, I, M2};
use crate::sequence::{QubitGraph, Sequence};

/// Largest register the dense statevector supports.
pub const MAX_QUBITS: usize = 14;
/// Bound on statevector norm drift per thousand integration steps.
pub const NORM_TOL: f64 = 1e-9;

/// Allowed norm drift after `steps` integration steps.
pub fn norm_budget(steps: usize) -> f64 {
    NORM_TOL * (steps as f64 / 1000.0).max(1.0)
}

/// Static error model on a qubit graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceModel {
    pub graph: QubitGraph,
    /// `J_e` per edge of `graph`, rad/s.
    pub couplings: Vec<f64>,
    /// `(b^X, b^Y, b^Z)` per qubit, rad/s.
    pub fields: Vec<[f64; 3]>,
    pub tau_p_s: f64,
}

impl DeviceModel {
    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        if self.couplings.len() != self.graph.edges.len() {
            return Err(Error::Data(format!(
                "{} couplings for {} edges",
                self.couplings.len(),
                self.graph.edges.len()
            )));
        }
        if self.fields.len() != self.graph.n {
            return Err(Error::Data(format!(
                "{} field triples for {} qubits",
                self.fields.len(),
                self.graph.n
            )));
        }
        let finite = self.couplings.iter().all(|x| x.is_finite())
            && self.fields.iter().flatten().all(|x| x.is_finite());
        if !finite {
            return Err(Error::Data("couplings must be finite".into()));
        }
        if !(self.tau_p_s > 0.0) {
            return Err(invalid("tau_p_s", "must be positive"));
        }
        Ok(())
    }

    /// Device restricted to the vertices of an embedding, relabelled in order.
    pub fn restrict(&self, vertices: &[usize]) -> Result<DeviceModel> {
        let graph = self.graph.induced(vertices)?;
        let couplings = graph
            .edges
            .iter()
            .map(|&[a, b]| {
                let (u, v) = (vertices[a], vertices[b]);
                self.graph
                    .edges
                    .iter()
                    .position(|&[x, y]| (x == u && y == v) || (x == v && y == u))
                    .map(|k| self.couplings[k])
                    .expect("induced edge exists")
            })
            .collect();
        let fields = vertices.iter().map(|&v| self.fields[v]).collect();
        Ok(DeviceModel {
            graph,
            couplings,
            fields,
            tau_p_s: self.tau_p_s,
        })
    }
}

/// Matrix-free Hamiltonian at one instant.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    n: usize,
    /// Diagonal from `ZZ` couplings and static `b^Z`.
    diag: Vec<f64>,
    /// Per-qubit local field `h_v` (drive plus static field).
    local: Vec<[f64; 3]>,
}

fn zsign(i: usize, v: usize) -> f64 {
    if i >> v & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Diagonal part `Σ_e J_e Z Z + Σ_v b^Z_v Z_v`.
fn static_diagonal(device: &DeviceModel) -> Vec<f64> {
    let n = device.n();
    (0..1usize << n)
        .map(|i| {
            let zz: f64 = device
                .graph
                .edges
                .iter()
                .zip(&device.couplings)
                .map(|(&[u, v], j)| j * zsign(i, u) * zsign(i, v))
                .sum();
            let z: f64 = (0..n).map(|v| device.fields[v][2] * zsign(i, v)).sum();
            zz + z
        })
        .collect()
}

/// `H` for the given per-qubit drive fields (`h·σ` convention, rad/s).
pub fn build_hamiltonian(device: &DeviceModel, drives: &[[f64; 3]]) -> Result<Hamiltonian> {
    device.validate()?;
    let n = device.n();
    if n > MAX_QUBITS {
        return Err(Error::Capacity { n, max: MAX_QUBITS });
    }
    if drives.len() != n {
        return Err(Error::Data(format!("{} drives for {n} qubits", drives.len())));
    }
    Ok(Hamiltonian {
        n,
        diag: static_diagonal(device),
        local: (0..n)
            .map(|v| [
                device.fields[v][0] + drives[v][0],
                device.fields[v][1] + drives[v][1],
                drives[v][2],
            ])
            .collect(),
    })
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// `out = H psi`.
    pub fn apply(&self, psi: &[C], out: &mut [C]) {
        apply_h(self.n, &self.diag, &self.local, psi, out)
    }
}

fn apply_h(n: usize, diag: &[f64], local: &[[f64; 3]], psi: &[C], out: &mut [C]) {
    for i in 0..psi.len() {
        let mut d = diag[i];
        for (v, h) in local.iter().enumerate() {
            d += h[2] * zsign(i, v);
        }
        out[i] = psi[i] * d;
    }
    for (v, h) in local.iter().enumerate().take(n) {
        if h[0] == 0.0 && h[1] == 0.0 {
            continue;
        }
        let lower = C::new(h[0], -h[1]);
        let upper = C::new(h[0], h[1]);
        let bit = 1usize << v;
        for i in 0..psi.len() {
            if i & bit == 0 {
                out[i] += lower * psi[i | bit];
            } else {
                out[i] += upper * psi[i & !bit];
            }
        }
    }
}

/// Apply a 2×2 gate to qubit `v`.
pub fn apply_gate(psi: &mut [C], v: usize, g: &M2) {
    let bit = 1usize << v;
    for i in 0..psi.len() {
        if i & bit == 0 {
            let (a, b) = (psi[i], psi[i | bit]);
            psi[i] = g[(0, 0)] * a + g[(0, 1)] * b;
            psi[i | bit] = g[(1, 0)] * a + g[(1, 1)] * b;
        }
    }
}

pub(crate) fn norm_sq(psi: &[C]) -> f64 {
    psi.iter().map(|x| x.norm_sqr()).sum()
}

/// Prepared propagation of one cycle of per-qubit schedules.
pub struct CycleEvolver<'a> {
    device: &'a DeviceModel,
    plan: Plan,
    diag: Vec<f64>,
    pulses: usize,
}

impl<'a> CycleEvolver<'a> {
    /// `schedules[v]` drives qubit `v`; all must share one duration.
    pub fn new(device: &'a DeviceModel, schedules: &[&Sequence], samples: usize) -> Result<Self> {
        device.validate()?;
        let n = device.n();
        if n > MAX_QUBITS {
            return Err(Error::Capacity { n, max: MAX_QUBITS });
        }
        if schedules.len() != n {
            return Err(Error::Data(format!("{} schedules for {n} qubits", schedules.len())));
        }
        let plan = plan(schedules, samples)?;
        Ok(CycleEvolver {
            device,
            diag: static_diagonal(device),
            pulses: schedules.iter().map(|s| s.pulse_count()).max().unwrap_or(0),
            plan,
        })
    }

    pub fn duration(&self) -> f64 {
        self.plan.grid.duration()
    }

    /// Pulses per qubit per cycle.
    pub fn pulses(&self) -> usize {
        self.pulses
    }

    /// Integration steps per cycle.
    pub fn steps(&self) -> usize {
        self.plan.grid.pieces.iter().map(|p| p.intervals()).sum()
    }

    fn step(&self, k: usize, psi: &mut Vec<C>, t: f64, dt: f64, scratch: &mut [Vec<C>; 5]) {
        let n = self.device.n();
        let fields = |tt: f64| -> Vec<[f64; 3]> {
            (0..n)
                .map(|v| {
                    let b = self.device.fields[v];
                    match &self.plan.lanes[v].drives[k] {
                        Some(d) => {
                            let f = d.field(tt);
                            [b[0] + f[0], b[1] + f[1], f[2]]
                        }
                        None => [b[0], b[1], 0.0],
                    }
                })
                .collect()
        };
        let [k1, k2, k3, k4, tmp] = scratch;
        let f0 = fields(t);
        let fm = fields(t + dt / 2.0);
        let f1 = fields(t + dt);
        let mi = -I;
        apply_h(n, &self.diag, &f0, psi, k1);
        k1.iter_mut().for_each(|x| *x *= mi);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k1[i] * (dt / 2.0);
        }
        apply_h(n, &self.diag, &fm, tmp, k2);
        k2.iter_mut().for_each(|x| *x *= mi);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k2[i] * (dt / 2.0);
        }
        apply_h(n, &self.diag, &fm, tmp, k3);
        k3.iter_mut().for_each(|x| *x *= mi);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k3[i] * dt;
        }
        apply_h(n, &self.diag, &f1, tmp, k4);
        k4.iter_mut().for_each(|x| *x *= mi);
        for i in 0..psi.len() {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
    }

    /// Evolve `psi` through one cycle in place.
    pub fn cycle(&self, psi: &mut Vec<C>) {
        let dim = psi.len();
        let mut scratch: [Vec<C>; 5] = std::array::from_fn(|_| vec![C::new(0.0, 0.0); dim]);
        let g = &self.plan.grid;
        for (k, piece) in g.pieces.iter().enumerate() {
            for (v, lane) in self.plan.lanes.iter().enumerate() {
                for &(phase, flip) in &lane.kicks[k] {
                    apply_gate(psi, v, &rotation(axis(phase), flip));
                }
            }
            for i in piece.nodes.start + 1..piece.nodes.end {
                let (t0, t1) = (g.times[i - 1], g.times[i]);
                self.step(k, psi, t0, t1 - t0, &mut scratch);
            }
        }
    }

    /// Dense one-cycle propagator (columns evolved independently).
    pub fn cycle_unitary(&self) -> DMatrix<C> {
        let dim = 1usize << self.device.n();
        let mut u = DMatrix::from_element(dim, dim, C::new(0.0, 0.0));
        for j in 0..dim {
            let mut psi = vec![C::new(0.0, 0.0); dim];
            psi[j] = c(1.0);
            self.cycle(&mut psi);
            for i in 0..dim {
                u[(i, j)] = psi[i];
            }
        }
        u
    }
}

/// Evolve `psi0` through `m` cycles of the per-qubit schedules.
pub fn evolve(
    device: &DeviceModel,
    schedules: &[&Sequence],
    m: usize,
    psi0: &[C],
    samples: usize,
) -> Result<Vec<C>> {
    let ev = CycleEvolver::new(device, schedules, samples)?;
    if psi0.len() != 1 << device.n() {
        return Err(Error::Data("statevector length does not match the register".into()));
    }
    let n0 = norm_sq(psi0);
    let mut psi = psi0.to_vec();
    for _ in 0..m {
        ev.cycle(&mut psi);
    }
    check_norm(n0, &psi, ev.duration() * m as f64, ev.steps() * m)?;
    Ok(psi)
}

pub(crate) fn check_norm(n0: f64, psi: &[C], t: f64, steps: usize) -> Result<()> {
    let defect = (norm_sq(psi) - n0).abs();
    if defect > norm_budget(steps) {
        return Err(Error::IntegrationFailure { t, defect });
    }
    Ok(())
}

/// Product state `⊗ U_pole |0⟩`.
pub fn product_state(poles: &[Pole]) -> Vec<C> {
    let mut psi = vec![C::new(0.0, 0.0); 1 << poles.len()];
    psi[0] = c(1.0);
    for (v, p) in poles.iter().enumerate() {
        apply_gate(&mut psi, v, &p.encoder());
    }
    psi
}

/// Probability of the all-zeros outcome after undoing the encoding.
pub fn decode_p0(poles: &[Pole], psi: &[C]) -> f64 {
    let mut out = psi.to_vec();
    for (v, p) in poles.iter().enumerate() {
        apply_gate(&mut out, v, &p.encoder().adjoint());
    }
    out[0].norm_sqr().clamp(0.0, 1.0)
}

/// One sampled survival point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalPoint {
    pub duration_s: f64,
    pub pulses: usize,
    pub shots: u64,
    pub zeros: u64,
    pub p0: f64,
}

/// Survival trace of one (method, embedding, state).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRecord {
    pub method: String,
    pub embedding_id: String,
    pub state_id: String,
    pub points: Vec<SurvivalPoint>,
}

/// Draw `shots` computational-basis samples and count all-zeros outcomes.
pub fn sample_zeros(p: f64, shots: u64, seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Binomial::new(shots, p.clamp(0.0, 1.0))
        .expect("probability in range")
        .sample(&mut rng)
}

/// Encode, evolve `m` cycles, decode and sample.
pub fn encode_decode_survival(
    state: &StateSpec,
    device: &DeviceModel,
    schedules: &[&Sequence],
    m: usize,
    shots: u64,
    seed: u64,
    samples: usize,
) -> Result<SurvivalPoint> {
    if shots == 0 {
        return Err(invalid("shots", "must be at least 1"));
    }
    if state.poles.len() != device.n() {
        return Err(Error::Data("state size does not match the register".into()));
    }
    let psi = evolve(device, schedules, m, &product_state(&state.poles), samples)?;
    let p = decode_p0(&state.poles, &psi);
    let zeros = sample_zeros(p, shots, seed);
    let ev_d = schedules[0].duration() * m as f64;
    Ok(SurvivalPoint {
        duration_s: ev_d,
        pulses: schedules.iter().map(|s| s.pulse_count()).max().unwrap_or(0) * m,
        shots,
        zeros,
        p0: zeros as f64 / shots as f64,
    })
}

/// Stable 64-bit seed for a task key.
pub fn task_seed(master: u64, parts: &[&str]) -> u64 {
    // FNV-1a over the key, then a splitmix64 finaliser mixed with the master seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in parts {
        for b in p.bytes().chain([0xff]) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    let mut z = h ^ master.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::PulseShape;

    fn two_qubit(j: f64) -> DeviceModel {
        DeviceModel {
            graph: QubitGraph::path(2),
            couplings: vec![j],
            fields: vec![[0.0; 3]; 2],
            tau_p_s: 1.0,
        }
    }

    #[test]
    fn zero_hamiltonian() {
        let d = two_qubit(0.0);
        let h = build_hamiltonian(&d, &[[0.0; 3]; 2]).unwrap();
        let psi = product_state(&[Pole::PlusX, Pole::PlusY]);
        let mut out = vec![C::new(0.0, 0.0); 4];
        h.apply(&psi, &mut out);
        assert!(out.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn zz_survival_is_cos_squared() {
        let j = 0.3;
        let t = 2.0;
        let d = two_qubit(j);
        let idle = Sequence::idle("idle", t).unwrap();
        let poles = [Pole::PlusX, Pole::PlusX];
        let psi = evolve(&d, &[&idle, &idle], 1, &product_state(&poles), 256).unwrap();
        let p = decode_p0(&poles, &psi);
        assert!((p - (j * t).cos().powi(2)).abs() < 1e-10, "{p}");
    }

    #[test]
    fn larmor_precession() {
        let delta = 0.4;
        let d = DeviceModel {
            graph: QubitGraph::path(1),
            couplings: vec![],
            fields: vec![[0.0, 0.0, delta]],
            tau_p_s: 1.0,
        };
        let t = 1.7;
        let idle = Sequence::idle("idle", t).unwrap();
        let psi = evolve(&d, &[&idle], 1, &product_state(&[Pole::PlusX]), 256).unwrap();
        let p = decode_p0(&[Pole::PlusX], &psi);
        assert!((p - (delta * t).cos().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn capacity() {
        let d = DeviceModel {
            graph: QubitGraph::path(15),
            couplings: vec![0.0; 14],
            fields: vec![[0.0; 3]; 15],
            tau_p_s: 1.0,
        };
        assert!(matches!(
            build_hamiltonian(&d, &[[0.0; 3]; 15]),
            Err(Error::Capacity { n: 15, max: 14 })
        ));
    }

    #[test]
    fn noiseless_dd_is_identity() {
        let d = two_qubit(0.0);
        let s = crate::sequence::sim_k("XY4", 1.0, 2, PulseShape::Square).unwrap();
        let state = StateSpec {
            id: "s".into(),
            kind: StateKind::Type2,
            poles: vec![Pole::PlusY, Pole::MinusX],
            seed: None,
        };
        let pt = encode_decode_survival(&state, &d, &[&s, &s], 3, 1000, 7, 256).unwrap();
        assert_eq!(pt.zeros, 1000);
        assert_eq!(pt.pulses, 12);
        assert_eq!(pt.duration_s, 24.0);
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(task_seed(1, &["a", "b"]), task_seed(1, &["a", "b"]));
        assert_ne!(task_seed(1, &["a", "b"]), task_seed(1, &["ab"]));
        assert_ne!(task_seed(1, &["a"]), task_seed(2, &["a"]));
    }
}
