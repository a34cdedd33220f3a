#![allow(dead_code)]

use ci_seeker::integrals::MolecularIntegrals;
use ci_seeker::qubit_map::PauliSum;
use ci_seeker::simulator::Statevector;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

pub type M = DMatrix<Complex64>;

pub const ASSETS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/assets");

pub fn asset(name: &str) -> String {
    format!("{ASSETS}/{name}")
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn single(letter: char) -> M {
    let (o, l, i) = (c(0.0), c(1.0), Complex64::i());
    let e = match letter {
        'I' => [l, o, o, l],
        'X' => [o, l, l, o],
        'Y' => [o, -i, i, o],
        'Z' => [l, o, o, -l],
        _ => panic!("bad letter {letter}"),
    };
    M::from_row_slice(2, 2, &e)
}

/// Kronecker product with qubit 0 as the least significant factor.
pub fn kron_chain(factors: &[M]) -> M {
    let mut out = M::from_element(1, 1, c(1.0));
    for f in factors.iter().rev() {
        out = out.kronecker(f);
    }
    out
}

/// Dense matrix of a Pauli word whose character `q` acts on qubit `q`.
pub fn word_matrix(letters: &str) -> M {
    let factors: Vec<M> = letters.chars().map(single).collect();
    kron_chain(&factors)
}

pub fn sum_matrix(op: &PauliSum) -> M {
    let n = op.n_qubits();
    let mut m = M::zeros(1 << n, 1 << n);
    for s in op.strings() {
        m += word_matrix(&s.letters()) * s.coeff;
    }
    m
}

/// Jordan-Wigner annihilator on `n` modes: `Z` string below `mode`, `|0><1|`.
pub fn annihilator(mode: usize, n: usize) -> M {
    let lower = M::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    let factors: Vec<M> = (0..n)
        .map(|q| match q.cmp(&mode) {
            std::cmp::Ordering::Less => single('Z'),
            std::cmp::Ordering::Equal => lower.clone(),
            std::cmp::Ordering::Greater => single('I'),
        })
        .collect();
    kron_chain(&factors)
}

pub fn creator(mode: usize, n: usize) -> M {
    annihilator(mode, n).adjoint()
}

/// Spin-free excitation `E_pq` over interleaved spin orbitals.
fn excitation(ops: &[(M, M)], p: usize, q: usize) -> M {
    let dim = ops[0].0.nrows();
    let mut e = M::zeros(dim, dim);
    for spin in 0..2 {
        e += &ops[2 * p + spin].1 * &ops[2 * q + spin].0;
    }
    e
}

/// `H = E_core + sum h_pq E_pq + 1/2 sum (pq|rs) (E_pq E_rs - delta_qr E_ps)`.
pub fn hamiltonian_matrix(ints: &MolecularIntegrals) -> M {
    let n = ints.n_orbitals;
    let n_so = 2 * n;
    let dim = 1usize << n_so;
    let ops: Vec<(M, M)> = (0..n_so)
        .map(|j| (annihilator(j, n_so), creator(j, n_so)))
        .collect();
    let e: Vec<Vec<M>> = (0..n)
        .map(|p| (0..n).map(|q| excitation(&ops, p, q)).collect())
        .collect();
    let mut h = M::identity(dim, dim) * c(ints.core_energy);
    for (p, row) in e.iter().enumerate() {
        for (q, epq) in row.iter().enumerate() {
            h += epq * c(ints.h(p, q));
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = ints.chem(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    let mut term = &e[p][q] * &e[r][s];
                    if q == r {
                        term -= &e[p][s];
                    }
                    h += term * c(0.5 * v);
                }
            }
        }
    }
    h
}

pub fn occupation_sector(index: usize, n_electrons: usize, n_alpha: usize) -> bool {
    let alpha = (0..usize::BITS as usize)
        .step_by(2)
        .filter(|b| index >> b & 1 == 1)
        .count();
    index.count_ones() as usize == n_electrons && alpha == n_alpha
}

/// Ascending eigenvalues of the Hermitian block selected by `keep`.
pub fn block_eigenvalues(m: &M, keep: impl Fn(usize) -> bool) -> Vec<f64> {
    let idx: Vec<usize> = (0..m.nrows()).filter(|&i| keep(i)).collect();
    let block = M::from_fn(idx.len(), idx.len(), |r, k| m[(idx[r], idx[k])]);
    let mut ev: Vec<f64> = block
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// `exp(a)` for anti-Hermitian `a`, through the eigenbasis of `i a`.
pub fn expm_anti_hermitian(a: &M) -> M {
    let herm = a * Complex64::i();
    let eig = herm.clone().symmetric_eigen();
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| (-Complex64::i() * l).exp()),
    );
    &eig.eigenvectors * M::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}

pub fn column(state: &Statevector) -> DVector<Complex64> {
    DVector::from_column_slice(state.amplitudes())
}

pub fn expect(m: &M, v: &DVector<Complex64>) -> Complex64 {
    (v.adjoint() * m * v)[(0, 0)]
}

pub fn variance_dense(h: &M, v: &DVector<Complex64>) -> f64 {
    let e = expect(h, v).re;
    let k = h - M::identity(h.nrows(), h.ncols()) * c(e);
    (&k * v).norm_squared()
}

pub fn random_state(n_qubits: usize, rng: &mut ChaCha20Rng) -> Statevector {
    let amps: Vec<Complex64> = (0..1usize << n_qubits)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    Statevector::normalized(n_qubits, amps).expect("nonzero random state")
}

pub fn max_abs_diff(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
