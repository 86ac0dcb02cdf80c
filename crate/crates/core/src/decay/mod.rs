//! Decay-curve analysis: exponential fits, bootstrap intervals and
//! time-averaged survival.

mod bootstrap;
mod fit;
mod spline;

pub use bootstrap::{bootstrap_mean_ci, quantile_sorted, BootstrapCi};
pub use fit::{characteristic_time, fit_decay, FitFlag, FitResult};
pub use spline::{time_avg_survival, CubicSpline};
