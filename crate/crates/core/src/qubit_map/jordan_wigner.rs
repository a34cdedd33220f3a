use num_complex::Complex64;

use super::pauli::{PauliKey, PauliSum};
use crate::error::{Error, Result};
use crate::integrals::{FermionOperator, Ladder};

/// `a+_j -> (X_j - iY_j)/2 Z_0 ... Z_{j-1}`, annihilation the adjoint.
pub fn jw_ladder(ladder: Ladder, n_qubits: usize) -> PauliSum {
    let j = ladder.mode;
    let z_string = (1u64 << j) - 1;
    let mut s = PauliSum::zero(n_qubits);
    s.add_term(
        PauliKey {
            x: 1 << j,
            z: z_string,
        },
        Complex64::new(0.5, 0.0),
    );
    let y_sign = if ladder.dagger { -0.5 } else { 0.5 };
    s.add_term(
        PauliKey {
            x: 1 << j,
            z: z_string | (1 << j),
        },
        Complex64::new(0.0, y_sign),
    );
    s
}

/// Maps each product of ladder operators through `ladder_map` and sums.
pub(crate) fn map_products(
    op: &FermionOperator,
    n_qubits: usize,
    ladder_map: impl Fn(Ladder) -> PauliSum,
) -> PauliSum {
    let mut cache = std::collections::HashMap::new();
    let mut out = PauliSum::zero(n_qubits);
    for (ops, coeff) in op.terms() {
        let mut term = PauliSum::identity(n_qubits, coeff);
        for l in ops {
            let factor = cache.entry(*l).or_insert_with(|| ladder_map(*l));
            term = term.mul(factor);
        }
        out.add(&term);
    }
    out.simplified()
}

pub fn jordan_wigner(op: &FermionOperator, n_spin_orbitals: usize) -> Result<PauliSum> {
    if op.max_mode() > n_spin_orbitals {
        return Err(Error::arg(format!(
            "operator references mode {} on a {n_spin_orbitals}-orbital register",
            op.max_mode() - 1
        )));
    }
    if n_spin_orbitals > super::pauli::MAX_QUBITS {
        return Err(Error::arg("register too large"));
    }
    Ok(map_products(op, n_spin_orbitals, |l| {
        jw_ladder(l, n_spin_orbitals)
    }))
}
