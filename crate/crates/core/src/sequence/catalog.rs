use std::f64::consts::PI;

use super::{PulseShape, Sequence};
use crate::error::{Error, Result};

/// Canonical catalog names.
pub const CATALOG: [&str; 6] = ["XY4", "EDD", "KDD", "UR10", "UR12", "RGA64c"];

const EDD: [f64; 8] = [0.0, 0.5, 0.0, 0.5, 0.5, 0.0, 0.5, 0.0];

fn edd() -> Vec<f64> {
    EDD.iter().map(|x| x * PI).collect()
}

fn kdd() -> Vec<f64> {
    let kx = [PI / 6.0, 0.0, PI / 2.0, 0.0, PI / 6.0];
    let ky: Vec<f64> = kx.iter().map(|p| p + PI / 2.0).collect();
    let mut out = Vec::with_capacity(20);
    for _ in 0..2 {
        out.extend_from_slice(&kx);
        out.extend_from_slice(&ky);
    }
    out
}

/// Inner EDD cycles with every phase shifted by the outer pulse phase.
fn rga64c() -> Vec<f64> {
    let e = edd();
    e.iter()
        .flat_map(|outer| e.iter().map(move |inner| outer + inner))
        .collect()
}

/// Resolve a user-supplied name (case-insensitive) to its canonical form.
pub fn canonical_name(name: &str) -> Result<&'static str> {
    CATALOG
        .iter()
        .copied()
        .find(|c| c.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownSequence(name.to_string()))
}

/// Phase list of a catalog sequence, in temporal order.
pub fn catalog_phases(name: &str) -> Result<Vec<f64>> {
    let phases = match canonical_name(name)? {
        "XY4" => vec![0.0, PI / 2.0, 0.0, PI / 2.0],
        "EDD" => edd(),
        "KDD" => kdd(),
        "UR10" => [0, 4, 2, 4, 0, 0, 4, 2, 4, 0]
            .iter()
            .map(|&k| k as f64 * PI / 5.0)
            .collect(),
        "UR12" => [0, 1, 3, 0, 4, 3, 3, 4, 0, 3, 1, 0]
            .iter()
            .map(|&k| k as f64 * PI / 3.0)
            .collect(),
        "RGA64c" => rga64c(),
        _ => unreachable!(),
    };
    Ok(phases)
}

/// Catalog sequence with back-to-back π pulses and no free evolution.
pub fn build_named(name: &str, tau_p: f64, shape: PulseShape) -> Result<Sequence> {
    let canon = canonical_name(name)?;
    let phases = catalog_phases(canon)?;
    super::transform::sim_variant_named(canon, &phases, tau_p, 0.0, shape)
}
