//! Gate synthesis for inductively coupled Josephson charge-qubit registers.
//!
//! A gate is realized by a closed polygon in the space of control fields
//! `(bz_1..bz_N, bx_1..bx_N)` that starts and ends at the degeneracy point.
//! Each polygon edge is traversed in one time unit; the induced propagator
//! is compared to the target in Frobenius norm and the vertex coordinates
//! are tuned with a restarted Nelder-Mead search.

// `!(x < tol)` is used on purpose: NaN residuals must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gates;
pub mod matrix;
pub mod nelder_mead;
pub mod register;
pub mod schedule;
pub mod serial;
pub mod synthesis;

pub use error::{Error, Result};

pub use matrix::{step_propagator, HermitianMatrix, UnitaryMatrix};

pub use register::{
    build_hamiltonian, edge_midpoints, propagate_edge, propagate_loop, ControlLoop, ControlVertex,
    RegisterModel,
};
pub use gates::{builtin_gate, read_matrix_file, su_project, write_matrix_file, TargetGate};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadOutcome};
pub use schedule::{
    cost_report, loop_to_schedule, read_result, verify, write_result, ControlSchedule, CostReport,
    VerificationReport,
};
pub use synthesis::{
    error_functional, pack, synthesize, unpack, vertex_condition, SynthesisConfig, SynthesisResult,
};
