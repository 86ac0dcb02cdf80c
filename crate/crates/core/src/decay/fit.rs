use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};

const MAX_ITER: usize = 500;
const GRAD_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFlag {
    Ok,
    /// All observations equal; `A = 0`, `γ = 0`, `c = p`.
    Degenerate,
    /// Converged with `γ = 0`.
    InfiniteTau,
    /// No decay distinguishable from noise: the amplitude is within two
    /// standard errors of zero, or the fit does not beat a constant at 95%
    /// (F test). Reported as a constant with `γ = 0`.
    Unresolved,
    MaxIterations,
}

impl FitFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            FitFlag::Ok => "ok",
            FitFlag::Degenerate => "degenerate",
            FitFlag::InfiniteTau => "infinite_tau",
            FitFlag::Unresolved => "unresolved",
            FitFlag::MaxIterations => "max_iterations",
        }
    }

    pub fn parse(s: &str) -> Option<FitFlag> {
        [
            FitFlag::Ok,
            FitFlag::Degenerate,
            FitFlag::InfiniteTau,
            FitFlag::Unresolved,
            FitFlag::MaxIterations,
        ]
            .into_iter()
            .find(|f| f.as_str() == s)
    }
}

/// Fitted `A e^{−γt} + c`.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub a: f64,
    pub gamma: f64,
    pub c: f64,
    /// `1/γ`, infinite when `γ = 0`.
    pub tau_gamma: f64,
    pub rss: f64,
    /// Standard errors of `(A, γ, c)`; NaN when not estimable.
    pub std_err: [f64; 3],
    pub iterations: usize,
    pub flag: FitFlag,
}

impl FitResult {
    pub fn eval(&self, t: f64) -> f64 {
        self.a * (-self.gamma * t).exp() + self.c
    }
}

/// `τ_γ = 1/γ`.
pub fn characteristic_time(fit: &FitResult) -> Result<f64> {
    if fit.gamma > 0.0 {
        Ok(1.0 / fit.gamma)
    } else {
        Err(Error::InfiniteTau)
    }
}

struct Problem<'a> {
    s: Vec<f64>,
    p: &'a [f64],
}

impl Problem<'_> {
    fn residuals(&self, x: &Vector3<f64>) -> Vec<f64> {
        self.s
            .iter()
            .zip(self.p)
            .map(|(&s, &p)| x[0] * (-x[1] * s).exp() + x[2] - p)
            .collect()
    }

    fn cost(&self, x: &Vector3<f64>) -> f64 {
        self.residuals(x).iter().map(|r| r * r).sum()
    }

    /// `JᵀJ` and `Jᵀr`.
    fn normal(&self, x: &Vector3<f64>) -> (Matrix3<f64>, Vector3<f64>) {
        let (jtj, jtr, _) = self.derivatives(x);
        (jtj, jtr)
    }

    /// `JᵀJ`, `Jᵀr` and the residual curvature `Σ r ∇²r`.
    fn derivatives(&self, x: &Vector3<f64>) -> (Matrix3<f64>, Vector3<f64>, Matrix3<f64>) {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        let mut curv = Matrix3::zeros();
        for (&s, &p) in self.s.iter().zip(self.p) {
            let e = (-x[1] * s).exp();
            let r = x[0] * e + x[2] - p;
            let j = Vector3::new(e, -x[0] * s * e, 1.0);
            jtj += j * j.transpose();
            jtr += j * r;
            curv[(0, 1)] -= r * s * e;
            curv[(1, 1)] += r * x[0] * s * s * e;
        }
        curv[(1, 0)] = curv[(0, 1)];
        (jtj, jtr, curv)
    }
}

const LO: [f64; 3] = [0.0, 0.0, 0.0];
const HI: [f64; 3] = [1.0, f64::INFINITY, 1.0];

fn clamp(x: Vector3<f64>) -> Vector3<f64> {
    Vector3::from_fn(|i, _| x[i].clamp(LO[i], HI[i]))
}

/// Parameters pinned at a bound with the gradient pushing outward.
fn active(x: &Vector3<f64>, g: &Vector3<f64>) -> [bool; 3] {
    std::array::from_fn(|i| (x[i] <= LO[i] && g[i] > 0.0) || (x[i] >= HI[i] && g[i] < 0.0))
}

fn projected_norm(x: &Vector3<f64>, g: &Vector3<f64>) -> f64 {
    let act = active(x, g);
    (0..3).filter(|&i| !act[i]).map(|i| g[i] * g[i]).sum::<f64>().sqrt()
}

fn initial_guess(t: &[f64], p: &[f64], tmax: f64) -> Vector3<f64> {
    let pmin = p.iter().copied().fold(f64::INFINITY, f64::min);
    let pmax = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let half = (t.len() / 2).max(2);
    let pts: Vec<(f64, f64)> = t[..half]
        .iter()
        .zip(&p[..half])
        .filter(|(_, &q)| q - pmin > 0.0)
        .map(|(&tt, &q)| (tt / tmax, (q - pmin).ln()))
        .collect();
    let mut g = 1.0;
    if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|x| x.0).sum::<f64>() / n;
        let my = pts.iter().map(|x| x.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|x| (x.0 - mx) * (x.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|x| (x.0 - mx).powi(2)).sum();
        if sxx > 0.0 && -sxy / sxx > 0.0 {
            g = -sxy / sxx;
        }
    }
    clamp(Vector3::new(pmax - pmin, g, pmin))
}

/// Nested-model F test at 95%: does the three-parameter decay explain
/// significantly more variance than a constant?
fn beats_constant(rss_const: f64, rss: f64, n: usize) -> bool {
    let dof = (n - 3) as f64;
    if rss <= 0.0 {
        return rss_const > 0.0;
    }
    let f = ((rss_const - rss) / 2.0) / (rss / dof);
    let crit = FisherSnedecor::new(2.0, dof)
        .map(|d| d.inverse_cdf(0.95))
        .unwrap_or(f64::INFINITY);
    f > crit
}

/// Bounded Levenberg–Marquardt fit of `A e^{−γt} + c` with `A, c ∈ [0, 1]`
/// and `γ ≥ 0`. Time is rescaled by its maximum internally.
pub fn fit_decay(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 4 {
        return Err(Error::Data(format!("need at least 4 points, got {}", points.len())));
    }
    for w in points.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::Data("times must be strictly increasing".into()));
        }
    }
    if points[0].0 < 0.0 || points.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
        return Err(Error::Data("times must be nonnegative and values finite".into()));
    }
    let t: Vec<f64> = points.iter().map(|x| x.0).collect();
    let p: Vec<f64> = points.iter().map(|x| x.1).collect();
    let p0 = p[0];
    if p.iter().all(|&q| q == p0) {
        return Ok(FitResult {
            a: 0.0,
            gamma: 0.0,
            c: p0,
            tau_gamma: f64::INFINITY,
            rss: 0.0,
            std_err: [f64::NAN; 3],
            iterations: 0,
            flag: FitFlag::Degenerate,
        });
    }
    let tmax = *t.last().expect("nonempty");
    let prob = Problem {
        s: t.iter().map(|x| x / tmax).collect(),
        p: &p,
    };
    let mut x = initial_guess(&t, &p, tmax);
    let mut cost = prob.cost(&x);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITER {
        let (jtj, g, curv) = prob.derivatives(&x);
        if projected_norm(&x, &g) <= GRAD_TOL {
            converged = true;
            break;
        }
        iterations += 1;
        let act = active(&x, &g);
        // Exact Hessian when it is positive definite on the free parameters;
        // Gauss-Newton alone converges only linearly for large residuals.
        let newton = jtj + curv;
        let free_pd = {
            let mut m = newton;
            for i in 0..3 {
                if act[i] {
                    for j in 0..3 {
                        m[(i, j)] = 0.0;
                        m[(j, i)] = 0.0;
                    }
                    m[(i, i)] = 1.0;
                }
            }
            m.cholesky().is_some()
        };
        let hess = if free_pd { newton } else { jtj };
        let mut improved = false;
        while lambda < 1e20 {
            let mut a = hess;
            for i in 0..3 {
                a[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
            }
            let mut rhs = -g;
            for i in 0..3 {
                if act[i] {
                    for j in 0..3 {
                        a[(i, j)] = 0.0;
                        a[(j, i)] = 0.0;
                    }
                    a[(i, i)] = 1.0;
                    rhs[i] = 0.0;
                }
            }
            let Some(step) = a.lu().solve(&rhs) else {
                lambda *= 10.0;
                continue;
            };
            let cand = clamp(x + step);
            let c2 = prob.cost(&cand);
            if c2 < cost {
                x = cand;
                cost = c2;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // No descent direction left at machine precision.
            converged = true;
            break;
        }
    }

    let (jtj, _) = prob.normal(&x);
    let n = p.len() as f64;
    let s2 = cost / (n - 3.0);
    let std_err = match jtj.try_inverse() {
        Some(inv) => {
            let se = |i: usize| (inv[(i, i)] * s2).max(0.0).sqrt();
            [se(0), se(1) / tmax, se(2)]
        }
        None => [f64::NAN; 3],
    };
    let gamma = x[1] / tmax;
    let mean = p.iter().sum::<f64>() / n;
    let rss_const: f64 = p.iter().map(|q| (q - mean).powi(2)).sum();
    if gamma > 0.0 && (!(x[0] > 2.0 * std_err[0]) || !beats_constant(rss_const, cost, p.len())) {
        return Ok(FitResult {
            a: 0.0,
            gamma: 0.0,
            c: mean,
            tau_gamma: f64::INFINITY,
            rss: rss_const,
            std_err: [f64::NAN; 3],
            iterations,
            flag: FitFlag::Unresolved,
        });
    }
    let flag = if !converged {
        FitFlag::MaxIterations
    } else if gamma == 0.0 {
        FitFlag::InfiniteTau
    } else {
        FitFlag::Ok
    };
    Ok(FitResult {
        a: x[0],
        gamma,
        c: x[2],
        tau_gamma: if gamma > 0.0 { 1.0 / gamma } else { f64::INFINITY },
        rss: cost,
        std_err,
        iterations,
        flag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(a: f64, g: f64, c: f64) -> Vec<(f64, f64)> {
        (0..=10).map(|i| {
            let t = 5.0 * i as f64;
            (t, a * (-g * t).exp() + c)
        }).collect()
    }

    #[test]
    fn noiseless_recovery() {
        let f = fit_decay(&curve(0.8, 0.1, 0.15)).unwrap();
        assert_eq!(f.flag, FitFlag::Ok);
        assert!((f.a - 0.8).abs() < 1e-8);
        assert!((f.gamma - 0.1).abs() < 1e-8);
        assert!((f.c - 0.15).abs() < 1e-8);
        assert!((characteristic_time(&f).unwrap() - 10.0).abs() < 1e-6);
    }

    #[test]
    fn constant_is_degenerate() {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 0.3)).collect();
        let f = fit_decay(&pts).unwrap();
        assert_eq!(f.flag, FitFlag::Degenerate);
        assert_eq!(f.c, 0.3);
        assert!(matches!(characteristic_time(&f), Err(Error::InfiniteTau)));
    }

    #[test]
    fn refit_is_idempotent() {
        let mut pts = curve(0.6, 0.05, 0.3);
        pts[3].1 += 0.01;
        pts[7].1 -= 0.01;
        let f = fit_decay(&pts).unwrap();
        let prob = Problem {
            s: pts.iter().map(|x| x.0 / 50.0).collect(),
            p: &pts.iter().map(|x| x.1).collect::<Vec<_>>(),
        };
        let x = Vector3::new(f.a, f.gamma * 50.0, f.c);
        let (_, g) = prob.normal(&x);
        assert!(projected_norm(&x, &g) <= GRAD_TOL);
    }

    #[test]
    fn flat_noise_is_unresolved() {
        // exact first point, then shot-noise jitter just below it
        let p = [1.0, 0.999, 1.0, 0.9995, 0.9985, 1.0, 0.999, 0.9995, 0.999, 1.0, 0.9985];
        let pts: Vec<(f64, f64)> = p.iter().enumerate().map(|(i, &q)| (i as f64, q)).collect();
        let f = fit_decay(&pts).unwrap();
        assert_eq!(f.flag, FitFlag::Unresolved);
        assert_eq!(f.tau_gamma, f64::INFINITY);
    }

    #[test]
    fn drift_within_noise_is_unresolved() {
        let jitter = [0.0, 3e-5, -2e-5, 1e-5, -4e-5, 2e-5, 0.0, -1e-5, 3e-5, -3e-5, 1e-5, -2e-5, 2e-5, -1e-5, 0.0, 4e-5, -3e-5, 1e-5, -2e-5, 3e-5, -1e-5];
        let drift: Vec<(f64, f64)> = jitter
            .iter()
            .enumerate()
            .map(|(i, j)| (i as f64, 1.0 - 1e-6 * i as f64 + j))
            .collect();
        assert_eq!(fit_decay(&drift).unwrap().flag, FitFlag::Unresolved);
        let decay: Vec<(f64, f64)> = jitter
            .iter()
            .enumerate()
            .map(|(i, j)| (i as f64, 0.5 * (-0.2 * i as f64).exp() + 0.5 + j))
            .collect();
        let f = fit_decay(&decay).unwrap();
        assert_eq!(f.flag, FitFlag::Ok);
        assert!((f.gamma - 0.2).abs() < 1e-3);
    }

    #[test]
    fn large_residual_converges() {
        // Gaussian-like decay: the exponential model leaves large residuals
        let pts: Vec<(f64, f64)> = (0..=20)
            .map(|i| {
                let t = i as f64;
                (t, 0.85 * (-(t / 8.0).powi(2)).exp() + 0.15)
            })
            .collect();
        let f = fit_decay(&pts).unwrap();
        assert_eq!(f.flag, FitFlag::Ok);
        assert!(f.iterations < 100, "{}", f.iterations);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_decay(&[(0.0, 1.0), (1.0, 0.5), (2.0, 0.3)]).is_err());
        assert!(fit_decay(&[(0.0, 1.0), (1.0, 0.5), (1.0, 0.3), (2.0, 0.1)]).is_err());
    }

    #[test]
    fn bounds_hold() {
        // rising data wants negative gamma; the fit must stay in bounds
        let pts: Vec<(f64, f64)> = (0..8).map(|i| (i as f64, 0.2 + 0.05 * i as f64)).collect();
        let f = fit_decay(&pts).unwrap();
        assert!(f.a >= 0.0 && f.a <= 1.0 && f.c >= 0.0 && f.c <= 1.0 && f.gamma >= 0.0);
    }
}
