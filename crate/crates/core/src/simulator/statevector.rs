use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-10;

/// Normalized amplitudes over `2^n` basis states; bit `j` of the index is
/// qubit `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if index >= 1 << n_qubits {
            return Err(Error::arg(format!(
                "basis index {index} exceeds {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::default(); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Takes amplitudes that are already normalized within 1e-10.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::arg(format!(
                "{} amplitudes for {n_qubits} qubits",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Contract(format!("state norm {norm} is not 1")));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n_qubits: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::arg("cannot normalize a zero vector"));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::from_amplitudes(n_qubits, amps)
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Basis label with qubit 0 leftmost.
    pub fn label(n_qubits: usize, index: usize) -> String {
        (0..n_qubits)
            .map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// One `index real imag` line per amplitude.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            let _ = writeln!(out, "{i} {:.17e} {:.17e}", a.re, a.im);
        }
        out
    }
}

pub fn parse_dump(text: &str) -> Result<Statevector> {
    let mut amps = Vec::new();
    for (line_no, line) in text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse {
            line: line_no + 1,
            message: format!("expected 'index real imag', got '{line}'"),
        };
        if fields.len() != 3 {
            return Err(bad());
        }
        let idx: usize = fields[0].parse().map_err(|_| bad())?;
        if idx != amps.len() {
            return Err(bad());
        }
        let re: f64 = fields[1].parse().map_err(|_| bad())?;
        let im: f64 = fields[2].parse().map_err(|_| bad())?;
        amps.push(Complex64::new(re, im));
    }
    if !amps.len().is_power_of_two() {
        return Err(Error::arg("dump length is not a power of two"));
    }
    let n = amps.len().trailing_zeros() as usize;
    Statevector::from_amplitudes(n, amps)
}

pub fn overlap(a: &Statevector, b: &Statevector) -> Result<Complex64> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::arg(format!(
            "overlap of {}- and {}-qubit states",
            a.n_qubits, b.n_qubits
        )));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

fn occupation_mask(occupied: &[usize], n_qubits: usize) -> Result<u64> {
    let mut mask = 0u64;
    for &j in occupied {
        if j >= n_qubits {
            return Err(Error::arg(format!(
                "orbital {j} outside {n_qubits}-qubit register"
            )));
        }
        if mask & (1 << j) != 0 {
            return Err(Error::arg(format!("orbital {j} listed twice")));
        }
        mask |= 1 << j;
    }
    Ok(mask)
}

/// Computational basis state with ones at the occupied positions.
pub fn prepare_determinant(occupied: &[usize], n_qubits: usize) -> Result<Statevector> {
    let mask = occupation_mask(occupied, n_qubits)?;
    Statevector::basis(n_qubits, mask as usize)
}

/// `a+_{modes[0]} a+_{modes[1]} ... |basis>` as (sign, index), `None` if Pauli-blocked.
fn create_sequence(modes: &[usize], mut basis: u64) -> Option<(f64, u64)> {
    let mut sign = 1.0;
    for &j in modes.iter().rev() {
        if (basis >> j) & 1 == 1 {
            return None;
        }
        if (basis & ((1 << j) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        basis |= 1 << j;
    }
    Some((sign, basis))
}

/// Open-shell excitation on top of a closed core: `(i_alpha, j_beta, j_alpha, i_beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpenShellPair {
    pub i_alpha: usize,
    pub j_beta: usize,
    pub j_alpha: usize,
    pub i_beta: usize,
}

impl OpenShellPair {
    /// Promotion of one electron from spatial orbital `i` to `j`.
    pub fn promote(i: usize, j: usize) -> Self {
        Self {
            i_alpha: 2 * i,
            j_beta: 2 * j + 1,
            j_alpha: 2 * j,
            i_beta: 2 * i + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinCoupling {
    Singlet,
    Triplet,
}

/// `(a+_{i_alpha} a+_{j_beta} +/- a+_{j_alpha} a+_{i_beta}) |core> / sqrt 2`.
pub fn prepare_open_shell(
    closed: &[usize],
    pair: OpenShellPair,
    coupling: SpinCoupling,
    n_qubits: usize,
) -> Result<Statevector> {
    let core = occupation_mask(closed, n_qubits)?;
    let open = [pair.i_alpha, pair.j_beta, pair.j_alpha, pair.i_beta];
    let open_mask = occupation_mask(&[pair.i_alpha, pair.j_beta], n_qubits)?
        | occupation_mask(&[pair.j_alpha, pair.i_beta], n_qubits)?;
    if open.iter().any(|&j| core & (1 << j) != 0) {
        return Err(Error::arg("open-shell orbitals overlap the closed core"));
    }
    if open_mask.count_ones() != 4 {
        return Err(Error::arg("open-shell pair indices must be distinct"));
    }
    let mut amps = vec![Complex64::default(); 1 << n_qubits];
    let second = match coupling {
        SpinCoupling::Singlet => 1.0,
        SpinCoupling::Triplet => -1.0,
    };
    let (s1, b1) = create_sequence(&[pair.i_alpha, pair.j_beta], core).expect("disjoint");
    let (s2, b2) = create_sequence(&[pair.j_alpha, pair.i_beta], core).expect("disjoint");
    let w = std::f64::consts::FRAC_1_SQRT_2;
    amps[b1 as usize] += Complex64::new(s1 * w, 0.0);
    amps[b2 as usize] += Complex64::new(second * s2 * w, 0.0);
    Statevector::from_amplitudes(n_qubits, amps)
}

pub fn prepare_open_shell_singlet(
    closed: &[usize],
    pair: OpenShellPair,
    n_qubits: usize,
) -> Result<Statevector> {
    prepare_open_shell(closed, pair, SpinCoupling::Singlet, n_qubits)
}
