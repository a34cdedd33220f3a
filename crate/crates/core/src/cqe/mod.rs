//! Variance-based contracted quantum eigensolver.

mod generator;
mod solve;
mod variance;

pub use generator::{
    residual_from_state, residual_generator, truncate_generator, GeneratorBasis,
    TruncatedGenerator, TwoBodyGenerator,
};
pub use solve::{
    cqe_solve, line_search_epsilon, orthogonality_check, CqeIterate, CqeOptions, CqeRun, LineSearch,
};
pub use variance::{auxiliary_state, variance_exact, variance_taylor};
