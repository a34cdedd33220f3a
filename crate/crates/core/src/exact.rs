//! Dense diagonalization used as the reference for every solver.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qubit_map::{PauliSum, QubitMapping, SymmetrySector};
use crate::simulator::{number_expectation, s_squared, sz_expectation, Statevector};

pub const MAX_DENSE_QUBITS: usize = 14;
pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 0.0005;
const HERMITICITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorLabel {
    pub n_electrons: f64,
    pub sz: f64,
    pub s_squared: f64,
    /// `s_squared` equals `s(s+1)` for some half-integer `s` within 1e-6.
    pub pure_spin: bool,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub energies: Vec<f64>,
    pub states: Vec<Statevector>,
    pub sector_labels: Option<Vec<SectorLabel>>,
}

fn check(h: &PauliSum) -> Result<()> {
    let defect = h.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::Contract(format!(
            "Hamiltonian is not Hermitian (defect {defect:.3e})"
        )));
    }
    if h.n_qubits() > MAX_DENSE_QUBITS {
        return Err(Error::arg(format!(
            "dense diagonalization is limited to {MAX_DENSE_QUBITS} qubits"
        )));
    }
    Ok(())
}

/// Matrix of `h` restricted to the given basis indices.
fn restricted_matrix(h: &PauliSum, basis: &[usize]) -> DMatrix<Complex64> {
    let position: HashMap<usize, usize> = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let dim = basis.len();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (key, c) in h.terms() {
        for (col, &b) in basis.iter().enumerate() {
            if let Some(&row) = position.get(&(b ^ key.x as usize)) {
                m[(row, col)] += c * key.phase_on(b as u64);
            }
        }
    }
    m
}

fn fix_phase(v: &mut [Complex64]) {
    if let Some(a) = v.iter().find(|a| a.norm() > 1e-8).copied() {
        let phase = a.conj() / a.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Replaces each degenerate block by the Gram-Schmidt sequence of projected
/// lowest-index basis vectors, then fixes phases.
fn fix_gauge(energies: &[f64], vectors: &mut [Vec<Complex64>]) {
    let dim = vectors.first().map_or(0, |v| v.len());
    let mut start = 0;
    while start < energies.len() {
        let mut end = start + 1;
        while end < energies.len()
            && (energies[end] - energies[start]).abs() < 1e-8 * energies[start].abs().max(1.0)
        {
            end += 1;
        }
        if end - start > 1 {
            let block: Vec<Vec<Complex64>> = vectors[start..end].to_vec();
            let mut chosen: Vec<Vec<Complex64>> = Vec::new();
            for b in 0..dim {
                if chosen.len() == block.len() {
                    break;
                }
                let mut w = vec![Complex64::default(); dim];
                for v in &block {
                    let c = v[b].conj();
                    for (wi, vi) in w.iter_mut().zip(v) {
                        *wi += c * vi;
                    }
                }
                for u in &chosen {
                    let c: Complex64 = u.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                    for (wi, ui) in w.iter_mut().zip(u) {
                        *wi -= c * ui;
                    }
                }
                let n = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                if n > 1e-6 {
                    w.iter_mut().for_each(|x| *x /= n);
                    chosen.push(w);
                }
            }
            for (slot, v) in vectors[start..end].iter_mut().zip(chosen) {
                *slot = v;
            }
        }
        start = end;
    }
    for v in vectors.iter_mut() {
        fix_phase(v);
    }
}

fn solve_dense(
    m: DMatrix<Complex64>,
    k: usize,
    embed: impl Fn(&[Complex64]) -> Result<Statevector>,
) -> Result<(Vec<f64>, Vec<Statevector>)> {
    let dim = m.nrows();
    if k > dim {
        return Err(Error::arg(format!(
            "requested {k} eigenpairs of a {dim}-dim matrix"
        )));
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    fix_gauge(&energies, &mut vectors);
    let states = vectors[..k]
        .iter()
        .map(|v| embed(v))
        .collect::<Result<Vec<_>>>()?;
    Ok((energies[..k].to_vec(), states))
}

/// The `k` lowest eigenpairs of a Hermitian Pauli sum.
pub fn diagonalize(h: &PauliSum, k: usize) -> Result<SpectrumResult> {
    check(h)?;
    let n = h.n_qubits();
    let basis: Vec<usize> = (0..1usize << n).collect();
    let (energies, states) = solve_dense(restricted_matrix(h, &basis), k, |v| {
        Statevector::normalized(n, v.to_vec())
    })?;
    Ok(SpectrumResult {
        energies,
        states,
        sector_labels: None,
    })
}

/// Whether `s2 = s(s+1)` for a half-integer `s`, within 1e-6.
pub fn is_pure_spin(s2: f64) -> bool {
    let s = (-1.0 + (1.0 + 4.0 * s2.max(0.0)).sqrt()) / 2.0;
    let rounded = (2.0 * s).round() / 2.0;
    (rounded * (rounded + 1.0) - s2).abs() < 1e-6
}

fn label(state: &Statevector, mapping: &dyn QubitMapping) -> Result<SectorLabel> {
    let fock = mapping.to_fock(state)?;
    let s2 = s_squared(&fock, mapping.n_spin_orbitals())?;
    Ok(SectorLabel {
        n_electrons: number_expectation(&fock)?,
        sz: sz_expectation(&fock)?,
        s_squared: s2,
        pure_spin: is_pure_spin(s2),
    })
}

/// [`diagonalize`] plus `(N, Sz, S^2)` labels computed through `mapping`.
pub fn diagonalize_labeled(
    h: &PauliSum,
    k: usize,
    mapping: &dyn QubitMapping,
) -> Result<SpectrumResult> {
    let mut result = diagonalize(h, k)?;
    let labels = result
        .states
        .iter()
        .map(|s| label(s, mapping))
        .collect::<Result<Vec<_>>>()?;
    result.sector_labels = Some(labels);
    Ok(result)
}

/// Diagonalizes an occupation-number (Jordan-Wigner) Hamiltonian within one
/// `(N, Sz)` block. Returned states live on the full register.
pub fn diagonalize_in_sector(
    h: &PauliSum,
    sector: SymmetrySector,
    k: usize,
) -> Result<SpectrumResult> {
    check(h)?;
    let n = h.n_qubits();
    sector.validate(n)?;
    let basis: Vec<usize> = (0..1usize << n)
        .filter(|&b| sector.contains(b as u64))
        .collect();
    let (energies, states) = solve_dense(restricted_matrix(h, &basis), k, |v| {
        let mut amps = vec![Complex64::default(); 1 << n];
        for (&b, a) in basis.iter().zip(v) {
            amps[b] = *a;
        }
        Statevector::normalized(n, amps)
    })?;
    let labels = states
        .iter()
        .map(|s| {
            let s2 = s_squared(s, n)?;
            Ok(SectorLabel {
                n_electrons: sector.n_electrons as f64,
                sz: sector.sz,
                s_squared: s2,
                pure_spin: is_pure_spin(s2),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult {
        energies,
        states,
        sector_labels: Some(labels),
    })
}

/// The `k` lowest eigenpairs within one `(N, Sz)` block of any mapping's
/// register. Register basis states must map to single occupation strings.
pub fn diagonalize_mapped_sector(
    h: &PauliSum,
    mapping: &dyn QubitMapping,
    sector: SymmetrySector,
    k: usize,
) -> Result<SpectrumResult> {
    check(h)?;
    let n = h.n_qubits();
    if n != mapping.n_qubits() {
        return Err(Error::arg(format!(
            "hamiltonian on {n} qubits, mapping register has {}",
            mapping.n_qubits()
        )));
    }
    sector.validate(mapping.n_spin_orbitals())?;
    let mut basis = Vec::new();
    for b in 0..1usize << n {
        let fock = mapping.to_fock(&Statevector::basis(n, b)?)?;
        let support: Vec<usize> = fock
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 1e-12)
            .map(|(i, _)| i)
            .collect();
        match support.as_slice() {
            [f] if sector.contains(*f as u64) => basis.push(b),
            [_] => {}
            _ => {
                return Err(Error::Contract(format!(
                    "mapping '{}' sends basis state {b} to a superposition",
                    mapping.name()
                )))
            }
        }
    }
    let (energies, states) = solve_dense(restricted_matrix(h, &basis), k, |v| {
        let mut amps = vec![Complex64::default(); 1 << n];
        for (&b, a) in basis.iter().zip(v) {
            amps[b] = *a;
        }
        Statevector::normalized(n, amps)
    })?;
    let labels = states
        .iter()
        .map(|s| label(s, mapping))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult {
        energies,
        states,
        sector_labels: Some(labels),
    })
}

/// Partitions ascending energies by chaining adjacent gaps below `threshold`.
pub fn degeneracy_groups(energies: &[f64], threshold: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, e) in energies.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if e - energies[*g.last().unwrap()] < threshold => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}
