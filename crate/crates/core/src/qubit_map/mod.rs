//! Fermion-to-qubit encodings and Pauli-operator algebra.

mod jordan_wigner;
mod parity;
mod pauli;

use num_complex::Complex64;

pub use jordan_wigner::{jordan_wigner, jw_ladder};
pub use parity::{blocked_index, parity_ladder, parity_taper, parity_taper_on};
pub use pauli::{pauli_product, PauliKey, PauliString, PauliSum, MAX_QUBITS, PRUNE};

use crate::error::{Error, Result};
use crate::integrals::FermionOperator;
use crate::registry::Registry;
use crate::simulator::Statevector;

/// Particle number and spin projection fixing a symmetry block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrySector {
    pub n_electrons: usize,
    pub sz: f64,
}

impl SymmetrySector {
    pub fn new(n_electrons: usize, sz: f64) -> Self {
        Self { n_electrons, sz }
    }

    pub fn n_alpha(&self) -> usize {
        (self.n_electrons as f64 / 2.0 + self.sz).round() as usize
    }

    pub fn n_beta(&self) -> usize {
        self.n_electrons.saturating_sub(self.n_alpha())
    }

    pub fn validate(&self, n_spin_orbitals: usize) -> Result<()> {
        let twice = self.n_electrons as f64 + 2.0 * self.sz;
        let n_orb = n_spin_orbitals / 2;
        if twice.fract() != 0.0 || twice < 0.0 || !(twice as usize).is_multiple_of(2) {
            return Err(Error::arg(format!(
                "Sz = {} incompatible with {} electrons",
                self.sz, self.n_electrons
            )));
        }
        if self.n_electrons > n_spin_orbitals || self.n_alpha() > n_orb || self.n_beta() > n_orb {
            return Err(Error::arg(format!(
                "sector (N={}, Sz={}) does not fit {} spin orbitals",
                self.n_electrons, self.sz, n_spin_orbitals
            )));
        }
        Ok(())
    }

    /// Z eigenvalues of the alpha-parity and total-parity qubits.
    pub fn parity_signs(&self) -> (f64, f64) {
        let sign = |n: usize| if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        (sign(self.n_alpha()), sign(self.n_electrons))
    }

    /// Whether an interleaved occupation bitstring lies in this sector.
    pub fn contains(&self, occupation: u64) -> bool {
        let alpha = (occupation & 0x5555_5555_5555_5555).count_ones() as usize;
        let beta = (occupation & 0xAAAA_AAAA_AAAA_AAAA).count_ones() as usize;
        alpha + beta == self.n_electrons && alpha == self.n_alpha()
    }
}

/// A fermion-to-qubit encoding together with the map between its register
/// and the Jordan-Wigner (occupation-number) register.
pub trait QubitMapping: Send + Sync {
    fn name(&self) -> &'static str;
    fn n_spin_orbitals(&self) -> usize;
    fn n_qubits(&self) -> usize;
    fn map(&self, op: &FermionOperator) -> Result<PauliSum>;
    /// Embeds a register state into the occupation-number register.
    fn to_fock(&self, state: &Statevector) -> Result<Statevector>;
    /// Inverse of [`to_fock`](Self::to_fock); fails if the state has weight
    /// outside the encoded subspace.
    #[allow(clippy::wrong_self_convention)]
    fn from_fock(&self, state: &Statevector) -> Result<Statevector>;
}

pub struct MappingContext {
    pub n_spin_orbitals: usize,
    pub sector: SymmetrySector,
}

#[derive(Debug, Clone)]
pub struct JordanWigner {
    n_spin_orbitals: usize,
}

impl JordanWigner {
    pub fn new(n_spin_orbitals: usize) -> Self {
        Self { n_spin_orbitals }
    }
}

fn check_register(state: &Statevector, n: usize) -> Result<()> {
    if state.n_qubits() != n {
        return Err(Error::arg(format!(
            "state has {} qubits, mapping expects {n}",
            state.n_qubits()
        )));
    }
    Ok(())
}

impl QubitMapping for JordanWigner {
    fn name(&self) -> &'static str {
        "jw"
    }
    fn n_spin_orbitals(&self) -> usize {
        self.n_spin_orbitals
    }
    fn n_qubits(&self) -> usize {
        self.n_spin_orbitals
    }
    fn map(&self, op: &FermionOperator) -> Result<PauliSum> {
        jordan_wigner(op, self.n_spin_orbitals)
    }
    fn to_fock(&self, state: &Statevector) -> Result<Statevector> {
        check_register(state, self.n_spin_orbitals)?;
        Ok(state.clone())
    }
    fn from_fock(&self, state: &Statevector) -> Result<Statevector> {
        check_register(state, self.n_spin_orbitals)?;
        Ok(state.clone())
    }
}

/// Parity encoding with the alpha-parity and total-parity qubits removed.
#[derive(Debug, Clone)]
pub struct ParityTapered {
    n_spin_orbitals: usize,
    sector: SymmetrySector,
    /// For each tapered basis index, the occupation index and reordering sign.
    basis: Vec<(usize, f64)>,
}

impl ParityTapered {
    pub fn new(n_spin_orbitals: usize, sector: SymmetrySector) -> Result<Self> {
        if !n_spin_orbitals.is_multiple_of(2) || n_spin_orbitals < 2 {
            return Err(Error::arg(
                "parity tapering needs an even register of at least 2",
            ));
        }
        sector.validate(n_spin_orbitals)?;
        let n_orb = n_spin_orbitals / 2;
        let n_q = n_spin_orbitals - 2;
        let tapered = [n_orb - 1, 2 * n_orb - 1];
        let kept: Vec<usize> = (0..n_spin_orbitals)
            .filter(|q| !tapered.contains(q))
            .collect();
        let alpha_parity = (sector.n_alpha() % 2) as u64;
        let total_parity = (sector.n_electrons % 2) as u64;
        let mut basis = Vec::with_capacity(1 << n_q);
        for t in 0..(1u64 << n_q) {
            let mut parity = 0u64;
            for (i, &q) in kept.iter().enumerate() {
                parity |= ((t >> i) & 1) << q;
            }
            parity |= alpha_parity << tapered[0];
            parity |= total_parity << tapered[1];
            let blocked = parity ^ (parity << 1) & ((1u64 << n_spin_orbitals) - 1);
            let occupied: Vec<usize> = (0..n_spin_orbitals)
                .filter(|j| (blocked >> j) & 1 == 1)
                .map(|j| (j % n_orb) * 2 + j / n_orb)
                .collect();
            let mut inversions = 0;
            for a in 0..occupied.len() {
                for b in a + 1..occupied.len() {
                    if occupied[a] > occupied[b] {
                        inversions += 1;
                    }
                }
            }
            let index: usize = occupied.iter().map(|m| 1usize << m).sum();
            basis.push((index, if inversions % 2 == 0 { 1.0 } else { -1.0 }));
        }
        Ok(Self {
            n_spin_orbitals,
            sector,
            basis,
        })
    }

    pub fn sector(&self) -> SymmetrySector {
        self.sector
    }

    /// Occupation index and sign of each tapered basis state.
    pub fn basis(&self) -> &[(usize, f64)] {
        &self.basis
    }
}

impl QubitMapping for ParityTapered {
    fn name(&self) -> &'static str {
        "parity-tapered"
    }
    fn n_spin_orbitals(&self) -> usize {
        self.n_spin_orbitals
    }
    fn n_qubits(&self) -> usize {
        self.n_spin_orbitals - 2
    }
    fn map(&self, op: &FermionOperator) -> Result<PauliSum> {
        parity_taper_on(op, self.n_spin_orbitals, self.sector)
    }
    fn to_fock(&self, state: &Statevector) -> Result<Statevector> {
        check_register(state, self.n_qubits())?;
        let mut amps = vec![Complex64::default(); 1 << self.n_spin_orbitals];
        for (t, &(f, sign)) in self.basis.iter().enumerate() {
            amps[f] = state.amplitudes()[t] * sign;
        }
        Statevector::from_amplitudes(self.n_spin_orbitals, amps)
    }
    fn from_fock(&self, state: &Statevector) -> Result<Statevector> {
        check_register(state, self.n_spin_orbitals)?;
        let amps: Vec<Complex64> = self
            .basis
            .iter()
            .map(|&(f, sign)| state.amplitudes()[f] * sign)
            .collect();
        let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (1.0 - kept).abs() > 1e-10 {
            return Err(Error::Symmetry(format!(
                "state has weight {:.3e} outside the tapered parity sector",
                1.0 - kept
            )));
        }
        Statevector::from_amplitudes(self.n_qubits(), amps)
    }
}

fn make_jw(ctx: &MappingContext) -> Result<Box<dyn QubitMapping>> {
    Ok(Box::new(JordanWigner::new(ctx.n_spin_orbitals)))
}

fn make_parity(ctx: &MappingContext) -> Result<Box<dyn QubitMapping>> {
    Ok(Box::new(ParityTapered::new(
        ctx.n_spin_orbitals,
        ctx.sector,
    )?))
}

pub fn mapping_registry() -> Registry<dyn QubitMapping, MappingContext> {
    Registry::new("mapping")
        .with("jw", make_jw)
        .with("parity-tapered", make_parity)
}
