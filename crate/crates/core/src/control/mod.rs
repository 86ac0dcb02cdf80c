//! Control propagation, control matrices and first-order error matrices.
//!
//! The control matrix `R^{μα}(t) = Tr[U_C† σ^μ U_C σ^α] / 2` tracks how the
//! control frame rotates each Pauli axis. Its time integrals give the 1-local
//! error matrix `χ₁` and, for a pair of neighbouring qubits, the 2-local
//! `ZZ` error matrix `χ₂`. Both vanish at the end of a cycle when the
//! schedule suppresses the corresponding errors at first order.

mod bangbang;
mod chi;
pub mod drag;
mod grid;
mod propagate;
mod symmetry;

pub use bangbang::{bang_bang_trace, bang_bang_traces};
pub use chi::{
    chi1, chi2, integrate, verify_first_order, EntryVerdict, ErrorKind, ErrorMatrix, SuppressionReport, Target,
    AXES, DEFAULT_TOL,
};
pub use grid::{Piece, TimeGrid, DEFAULT_SAMPLES, MIN_SAMPLES};
pub(crate) use grid::{plan, Plan};
pub use propagate::{
    control_trace, control_traces, propagate, propagate_many, rk4_unitary, ControlTrace, PropagateOptions,
    Propagation, DEFAULT_UNITARITY_TOL, REALNESS_TOL,
};
pub use symmetry::{classify_all, classify_symmetry, Relation, RelationCheck, SymmetryReport, DEFAULT_SYMMETRY_TOL};
