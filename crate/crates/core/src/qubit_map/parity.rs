use num_complex::Complex64;

use super::jordan_wigner::map_products;
use super::pauli::{PauliKey, PauliSum};
use super::SymmetrySector;
use crate::error::{Error, Result};
use crate::integrals::{FermionOperator, Ladder};

const SYMMETRY_TOL: f64 = 1e-8;

/// Parity encoding of ladder operators on `n_qubits`:
/// `a+_j -> (Z_{j-1} X_j - i Y_j)/2 X_{j+1} ... X_{n-1}`.
pub fn parity_ladder(ladder: Ladder, n_qubits: usize) -> PauliSum {
    let j = ladder.mode;
    let upper = ((1u64 << n_qubits) - 1) & !((1u64 << (j + 1)) - 1);
    let below = if j > 0 { 1u64 << (j - 1) } else { 0 };
    let mut s = PauliSum::zero(n_qubits);
    s.add_term(
        PauliKey {
            x: upper | (1 << j),
            z: below,
        },
        Complex64::new(0.5, 0.0),
    );
    let y_sign = if ladder.dagger { -0.5 } else { 0.5 };
    s.add_term(
        PauliKey {
            x: upper | (1 << j),
            z: 1 << j,
        },
        Complex64::new(0.0, y_sign),
    );
    s
}

/// Interleaved spin orbital `2p + s` to spin-blocked position `s * n + p`.
pub fn blocked_index(mode: usize, n_orbitals: usize) -> usize {
    (mode % 2) * n_orbitals + mode / 2
}

/// Parity mapping followed by removal of the two qubits holding the alpha
/// parity (`n_orbitals - 1`) and total parity (`2 n_orbitals - 1`).
pub fn parity_taper(op: &FermionOperator, sector: SymmetrySector) -> Result<PauliSum> {
    let n_modes = op.max_mode();
    let n_so = if n_modes.is_multiple_of(2) {
        n_modes
    } else {
        n_modes + 1
    };
    parity_taper_on(op, n_so.max(2), sector)
}

pub fn parity_taper_on(
    op: &FermionOperator,
    n_spin_orbitals: usize,
    sector: SymmetrySector,
) -> Result<PauliSum> {
    if !n_spin_orbitals.is_multiple_of(2) || n_spin_orbitals < 2 {
        return Err(Error::arg(
            "parity tapering needs an even register of at least 2",
        ));
    }
    if op.max_mode() > n_spin_orbitals {
        return Err(Error::arg("operator exceeds register"));
    }
    sector.validate(n_spin_orbitals)?;
    let dn = op.number_violation();
    let dsz = op.sz_violation();
    if dn > SYMMETRY_TOL || dsz > SYMMETRY_TOL {
        return Err(Error::Symmetry(format!(
            "operator does not conserve N and Sz (commutator norms {dn:.3e}, {dsz:.3e})"
        )));
    }
    let n_orb = n_spin_orbitals / 2;
    let mapped = map_products(op, n_spin_orbitals, |l| {
        parity_ladder(
            Ladder {
                mode: blocked_index(l.mode, n_orb),
                dagger: l.dagger,
            },
            n_spin_orbitals,
        )
    });
    let (alpha_sign, total_sign) = sector.parity_signs();
    mapped.taper(&[(n_orb - 1, alpha_sign), (2 * n_orb - 1, total_sign)])
}
