use super::measurement::{expectation, MeasurementSettings};
use super::statevector::Statevector;
use crate::error::{Error, Result};
use crate::integrals::{number_operator, spin_squared_operator, sz_operator, FermionOperator};
use crate::qubit_map::jordan_wigner;

fn fock_expectation(state: &Statevector, op: &FermionOperator) -> Result<f64> {
    let pauli = jordan_wigner(op, state.n_qubits())?;
    expectation(state, &pauli, &MeasurementSettings::exact())
}

/// `<S^2>` of a state on the interleaved occupation-number register.
pub fn s_squared(state: &Statevector, n_spin_orbitals: usize) -> Result<f64> {
    if !n_spin_orbitals.is_multiple_of(2) {
        return Err(Error::arg(format!(
            "odd register size {n_spin_orbitals} has no spin pairing"
        )));
    }
    if state.n_qubits() != n_spin_orbitals {
        return Err(Error::arg("state register differs from n_spin_orbitals"));
    }
    fock_expectation(state, &spin_squared_operator(n_spin_orbitals)?)
}

pub fn number_expectation(state: &Statevector) -> Result<f64> {
    fock_expectation(state, &number_operator(state.n_qubits()))
}

pub fn sz_expectation(state: &Statevector) -> Result<f64> {
    fock_expectation(state, &sz_operator(state.n_qubits()))
}
