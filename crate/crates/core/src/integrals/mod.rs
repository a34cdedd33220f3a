//! Electronic Hamiltonian data: FCIDUMP ingestion, second quantization and
//! the analytic two-state vibronic model.

mod fcidump;
mod fermion;
mod hamiltonian;
mod vibronic;

pub use fcidump::{parse_fcidump, read_fcidump, write_fcidump};
pub use fermion::{FermionOperator, Ladder};
pub use hamiltonian::{
    build_hamiltonian, energy_from_rdms, number_operator, spin_squared_operator, sz_operator,
    MolecularIntegrals,
};
pub use vibronic::{model_adiabatic, Adiabatic, VibronicEmbedding, VibronicModel};
