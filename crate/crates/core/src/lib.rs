//! Reduced-subspace simulation of parallel and sequential Grover circuits for
//! the iterated search problem (k-ISP), with a brute-force statevector check
//! and the analysis tooling around it.
//!
//! The `k` registers of `n` qubits each are described by `2^k` labels over
//! `{e, N}`; [`reduced`] holds the exact small orthogonal operators,
//! [`graph`] the operator-graph view and its approximation rewrites,
//! [`closed_form`] the analytic `PG_2` model, [`schedule`] the circuits that
//! solve the problem, [`statevector`] the full-Hilbert-space oracle and
//! [`analysis`] the sweeps and bounds.

pub mod analysis;
pub mod closed_form;
pub mod error;
pub mod graph;
pub mod label;
pub mod numfmt;
pub mod reduced;
pub mod schedule;
pub mod statevector;

pub use error::{IspError, Result};
pub use label::{enumerate_labels, weight_of_label, BasisLabel, ProblemParams, Symbol};
pub use reduced::{EdgeKind, InitMode, ReducedOperator, ReducedState};
pub use schedule::{K3Constants, Schedule};
