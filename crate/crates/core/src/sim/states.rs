use std::collections::HashSet;
use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{c, I, M2};

/// One of the six single-qubit Bloch-sphere poles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pole {
    #[serde(rename = "+z")]
    PlusZ,
    #[serde(rename = "-z")]
    MinusZ,
    #[serde(rename = "+x")]
    PlusX,
    #[serde(rename = "-x")]
    MinusX,
    #[serde(rename = "+y")]
    PlusY,
    #[serde(rename = "-y")]
    MinusY,
}

impl Pole {
    pub const ALL: [Pole; 6] = [
        Pole::PlusZ,
        Pole::MinusZ,
        Pole::PlusX,
        Pole::MinusX,
        Pole::PlusY,
        Pole::MinusY,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Pole::PlusZ => "+z",
            Pole::MinusZ => "-z",
            Pole::PlusX => "+x",
            Pole::MinusX => "-x",
            Pole::PlusY => "+y",
            Pole::MinusY => "-y",
        }
    }

    /// Encoding unitary with `U|0⟩` equal to the pole state: `I`, `X`, `H`,
    /// `HX`, `SH`, `SHX`.
    pub fn encoder(self) -> M2 {
        let x = M2::new(c(0.0), c(1.0), c(1.0), c(0.0));
        let h = M2::new(c(1.0), c(1.0), c(1.0), c(-1.0)) * c(FRAC_1_SQRT_2);
        let s = M2::new(c(1.0), c(0.0), c(0.0), I);
        match self {
            Pole::PlusZ => M2::identity(),
            Pole::MinusZ => x,
            Pole::PlusX => h,
            Pole::MinusX => h * x,
            Pole::PlusY => s * h,
            Pole::MinusY => s * h * x,
        }
    }

    /// Bloch vector of the pole.
    pub fn bloch(self) -> [f64; 3] {
        match self {
            Pole::PlusZ => [0.0, 0.0, 1.0],
            Pole::MinusZ => [0.0, 0.0, -1.0],
            Pole::PlusX => [1.0, 0.0, 0.0],
            Pole::MinusX => [-1.0, 0.0, 0.0],
            Pole::PlusY => [0.0, 1.0, 0.0],
            Pole::MinusY => [0.0, -1.0, 0.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Type1,
    Type2,
}

/// A separable input state, one pole per qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub id: String,
    pub kind: StateKind,
    pub poles: Vec<Pole>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Uniform pole states followed by seeded random pole assignments, all
/// distinct. Fewer random states are returned when the space is exhausted.
pub fn prepare_states(n: usize, count_type1: usize, count_type2: usize, seed: u64) -> Vec<StateSpec> {
    let mut seen: HashSet<Vec<Pole>> = HashSet::new();
    let mut out = Vec::with_capacity(count_type1 + count_type2);
    for (i, &p) in Pole::ALL.iter().take(count_type1).enumerate() {
        let poles = vec![p; n];
        seen.insert(poles.clone());
        out.push(StateSpec {
            id: format!("t1-{i}"),
            kind: StateKind::Type1,
            poles,
            seed: None,
        });
    }
    let space = 6f64.powi(n.min(64) as i32);
    let available = (space - seen.len() as f64).max(0.0);
    let target = (count_type2 as f64).min(available) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k = 0;
    while k < target {
        let poles: Vec<Pole> = (0..n).map(|_| Pole::ALL[rng.gen_range(0..6)]).collect();
        if seen.insert(poles.clone()) {
            out.push(StateSpec {
                id: format!("t2-{k}"),
                kind: StateKind::Type2,
                poles,
                seed: Some(seed),
            });
            k += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::adjoint_rep;

    #[test]
    fn encoders_hit_their_poles() {
        for p in Pole::ALL {
            let u = p.encoder();
            // Bloch vector of U|0><0|U† from the Z row of the adjoint map of U†
            let (r, _) = adjoint_rep(&u.adjoint());
            let b = p.bloch();
            for a in 0..3 {
                assert!((r[(2, a)] - b[a]).abs() < 1e-14, "{p:?}");
            }
        }
    }

    #[test]
    fn single_qubit_has_only_uniform_states() {
        let s = prepare_states(1, 6, 14, 3);
        assert_eq!(s.len(), 6);
        let poles: Vec<Pole> = s.iter().map(|x| x.poles[0]).collect();
        assert_eq!(poles, Pole::ALL.to_vec());
    }

    #[test]
    fn seeded_and_distinct() {
        let a = prepare_states(5, 6, 14, 11);
        assert_eq!(a, prepare_states(5, 6, 14, 11));
        assert_ne!(a, prepare_states(5, 6, 14, 12));
        let set: HashSet<_> = a.iter().map(|s| s.poles.clone()).collect();
        assert_eq!(set.len(), 20);
    }
}
