//! Excited-state quantum eigensolvers on a statevector simulator, together
//! with conical-intersection characterization tools.
//!
//! The pipeline runs from molecular integrals (FCIDUMP files or an analytic
//! vibronic model) through a fermion-to-qubit mapping to one of the
//! registered eigensolvers, and feeds energies into branching-plane scans and
//! minimum-energy crossing-point searches.

pub mod ci_tools;
pub mod cli;
pub mod cqe;
pub mod error;
pub mod exact;
pub mod integrals;
pub mod qubit_map;
pub mod registry;
pub mod simulator;
pub mod solver;
pub mod vqd;

pub use error::{Error, Result};
