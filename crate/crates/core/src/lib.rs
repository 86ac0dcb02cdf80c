//! Crosstalk-robust dynamical decoupling.
//!
//! `crdd` builds dynamical-decoupling (DD) pulse schedules, staggers them over
//! two-colourable qubit graphs so that static `ZZ` crosstalk cancels at first
//! order, checks that cancellation through control-matrix integrals, and runs
//! small exact simulations of survival-probability experiments together with
//! the decay fitting used to summarise them.
//!
//! The crate is organised by stage:
//!
//! - [`sequence`]: pulse shapes, the named sequence catalog (XY4, EDD, KDD,
//!   UR10, UR12, RGA64c), simultaneous (SIM) and crosstalk-robust (CR)
//!   schedules, padding, and graph two-colouring.
//! - [`control`]: single-qubit control propagation, control matrices, 1- and
//!   2-local error matrices, suppression verdicts and symmetry classification.
//! - [`sim`]: matrix-free statevector simulation under static `ZZ` couplings
//!   and 1-local fields, with encode/decode survival sampling.
//! - [`decay`]: exponential decay fits, bootstrap intervals and spline-based
//!   time-averaged survival.
//! - [`harness`]: experiment plans, resource-normalised duration schedules,
//!   dataset generation and summary tables.
//! - [`io`] and [`report`]: the JSON/CSV formats and static SVG plots.
//! - [`cli`]: the command-line dispatcher behind the `crdd` binary.
//!
//! Times are in seconds and angular rates in rad/s throughout.

pub mod cli;
pub mod control;
pub mod decay;
pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod report;
pub mod sequence;
pub mod sim;

pub use error::{Error, Result};
