//! DRAG pulse calibration.
//!
//! In a two-level model the derivative quadrature tilts the net rotation out
//! of the equatorial plane and shortens it. Rescaling the in-phase amplitude
//! and adding a static detuning during the pulse restores an exact rotation
//! by `θ` about the pulse axis. The pair is found by Newton's method,
//! continued from the plain Gaussian (`β = 0`) in small steps of `β`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::propagate::rk4_unitary;
use crate::error::{Error, Result};
use crate::linalg::{pauli_z, I};
use crate::sequence::{envelope_unchecked, PulseShape};

type Key = (u64, u64, u64, usize);

fn cache() -> &'static Mutex<HashMap<Key, (f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, (f64, f64)>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `(amplitude scale, detuning in rad/s)` making a pulse an exact rotation
/// when integrated with `steps` fourth-order steps. Non-DRAG shapes return
/// `(1, 0)`.
pub fn calibration(shape: &PulseShape, theta: f64, tau_p: f64, steps: usize) -> Result<(f64, f64)> {
    let beta = shape.drag_coefficient();
    if !matches!(shape, PulseShape::GaussianDrag { .. }) || beta == 0.0 {
        return Ok((1.0, 0.0));
    }
    let frac = shape.sigma(tau_p).expect("drag has sigma") / tau_p;
    let key = (theta.to_bits(), frac.to_bits(), beta.to_bits(), steps);
    if let Some(&(s, d)) = cache().lock().expect("cache lock").get(&key) {
        return Ok((s, d / tau_p));
    }
    let (s, d) = solve(theta, frac, beta, steps)?;
    cache().lock().expect("cache lock").insert(key, (s, d));
    Ok((s, d / tau_p))
}

fn residual(theta: f64, frac: f64, beta: f64, steps: usize, x: [f64; 2]) -> [f64; 2] {
    let shape = PulseShape::GaussianDrag {
        sigma_s: Some(frac),
        drag_coefficient: Some(beta),
    };
    let w = rk4_unitary(
        |t| {
            let (wi, wq) = envelope_unchecked(&shape, theta, 1.0, t);
            [0.5 * x[0] * wi, 0.5 * x[0] * wq, 0.5 * x[1]]
        },
        0.0,
        1.0,
        steps,
    );
    let cos_half = w.trace().re * 0.5;
    let bz = (I * (w * pauli_z()).trace() * 0.5).re;
    [cos_half - (theta / 2.0).cos(), bz]
}

fn solve(theta: f64, frac: f64, beta: f64, steps: usize) -> Result<(f64, f64)> {
    let rounds = ((beta.abs() / 0.05).ceil() as usize).max(1);
    let mut x = [1.0, 0.0];
    for k in 1..=rounds {
        let b = beta * k as f64 / rounds as f64;
        let mut converged = false;
        for _ in 0..60 {
            let f = residual(theta, frac, b, steps, x);
            if f[0].abs().max(f[1].abs()) < 1e-14 {
                converged = true;
                break;
            }
            let eps = 1e-7;
            let fs = residual(theta, frac, b, steps, [x[0] + eps, x[1]]);
            let fd = residual(theta, frac, b, steps, [x[0], x[1] + eps]);
            let j = [
                [(fs[0] - f[0]) / eps, (fd[0] - f[0]) / eps],
                [(fs[1] - f[1]) / eps, (fd[1] - f[1]) / eps],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < 1e-300 {
                break;
            }
            let dx0 = (j[1][1] * f[0] - j[0][1] * f[1]) / det;
            let dx1 = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
            x = [x[0] - dx0, x[1] - dx1];
        }
        if !converged {
            let f = residual(theta, frac, b, steps, x);
            if f[0].abs().max(f[1].abs()) > 1e-12 {
                return Err(Error::IntegrationFailure {
                    t: 0.0,
                    defect: f[0].abs().max(f[1].abs()),
                });
            }
        }
    }
    Ok((x[0], x[1]))
}
