//! Noiseless statevector engine.

mod exponential;
mod measurement;
mod rdm;
mod spin;
mod statevector;

pub use exponential::apply_exponential;
pub use measurement::{
    expectation, sampled_standard_error, term_expectations, MeasurementSettings, Shots,
};
pub use rdm::{annihilate, create, one_rdm, transition_2rdm, Tensor4};
pub use spin::{number_expectation, s_squared, sz_expectation};
pub use statevector::{
    overlap, parse_dump, prepare_determinant, prepare_open_shell, prepare_open_shell_singlet,
    OpenShellPair, SpinCoupling, Statevector,
};
