//! Conical-intersection tools: branching plane, surface scans, gradients and
//! minimum-energy crossing point search.

mod backend;
mod meci;
mod plane;
mod scan;

pub use backend::{
    backend_registry, BackendContext, EnergyBackend, ExactBackend, IntegralProvider, ModelBackend,
    SolverBackend, StatePair,
};
pub use meci::{fd_gradient, meci_optimize, MeciOptions, MeciResult, MeciRow, MeciTrace};
pub use plane::{gh_vectors_model, orthogonalize_gh, BranchingPlane};
pub use scan::{scan_surface, Surface, SurfaceRow};
