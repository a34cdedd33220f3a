use num_complex::Complex64;
use rayon::prelude::*;

use super::statevector::Statevector;
use crate::error::{Error, Result};

/// Dense rank-4 complex tensor indexed `[p][q][s][t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<Complex64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::default(); n * n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn at(&self, p: usize, q: usize, s: usize, t: usize) -> usize {
        ((p * self.n + q) * self.n + s) * self.n + t
    }

    pub fn get(&self, p: usize, q: usize, s: usize, t: usize) -> Complex64 {
        self.data[self.at(p, q, s, t)]
    }

    pub fn set(&mut self, p: usize, q: usize, s: usize, t: usize, v: Complex64) {
        let i = self.at(p, q, s, t);
        self.data[i] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `a_j` applied to raw amplitudes.
pub fn annihilate(j: usize, amps: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); amps.len()];
    let below = (1usize << j) - 1;
    for (b, a) in amps.iter().enumerate() {
        if (b >> j) & 1 == 1 {
            let v = if (b & below).count_ones().is_multiple_of(2) {
                *a
            } else {
                -a
            };
            out[b ^ (1 << j)] = v;
        }
    }
    out
}

/// `a+_j` applied to raw amplitudes.
pub fn create(j: usize, amps: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); amps.len()];
    let below = (1usize << j) - 1;
    for (b, a) in amps.iter().enumerate() {
        if (b >> j) & 1 == 0 {
            let v = if (b & below).count_ones().is_multiple_of(2) {
                *a
            } else {
                -a
            };
            out[b | (1 << j)] = v;
        }
    }
    out
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check(bra: &Statevector, ket: &Statevector, n: usize) -> Result<()> {
    if bra.n_qubits() != n || ket.n_qubits() != n {
        return Err(Error::arg(format!(
            "2-RDM on {n} spin orbitals needs matching registers (got {} and {})",
            bra.n_qubits(),
            ket.n_qubits()
        )));
    }
    Ok(())
}

/// Pair-annihilated vectors `a_t a_s |v>` for all `s != t`, indexed `s * n + t`.
fn pair_annihilations(v: &[Complex64], n: usize) -> Vec<Option<Vec<Complex64>>> {
    let singles: Vec<Vec<Complex64>> = (0..n).map(|s| annihilate(s, v)).collect();
    (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (s, t) = (idx / n, idx % n);
            (s != t).then(|| annihilate(t, &singles[s]))
        })
        .collect()
}

/// `D[p][q][s][t] = <bra| a+_p a+_q a_t a_s |ket>`.
pub fn transition_2rdm(
    bra: &Statevector,
    ket: &Statevector,
    n_spin_orbitals: usize,
) -> Result<Tensor4> {
    let n = n_spin_orbitals;
    check(bra, ket, n)?;
    let left = pair_annihilations(bra.amplitudes(), n);
    let right = pair_annihilations(ket.amplitudes(), n);
    let mut d = Tensor4::zeros(n);
    for (pq, l) in left.iter().enumerate() {
        let Some(l) = l else { continue };
        for (st, r) in right.iter().enumerate() {
            let Some(r) = r else { continue };
            d.data[pq * n * n + st] = inner(l, r);
        }
    }
    Ok(d)
}

/// `D[p][q] = <bra| a+_p a_q |ket>`, row-major.
pub fn one_rdm(
    bra: &Statevector,
    ket: &Statevector,
    n_spin_orbitals: usize,
) -> Result<Vec<Complex64>> {
    let n = n_spin_orbitals;
    check(bra, ket, n)?;
    let left: Vec<Vec<Complex64>> = (0..n).map(|p| annihilate(p, bra.amplitudes())).collect();
    let right: Vec<Vec<Complex64>> = (0..n).map(|q| annihilate(q, ket.amplitudes())).collect();
    let mut d = vec![Complex64::default(); n * n];
    for p in 0..n {
        for q in 0..n {
            d[p * n + q] = inner(&left[p], &right[q]);
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::prepare_determinant;

    #[test]
    fn slater_condon_diagonal() {
        let s = prepare_determinant(&[0, 1], 4).unwrap();
        let d = transition_2rdm(&s, &s, 4).unwrap();
        assert!((d.get(0, 1, 0, 1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((d.get(0, 1, 1, 0) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn trace_sum_rule() {
        let s = prepare_determinant(&[0, 2, 3], 6).unwrap();
        let d = transition_2rdm(&s, &s, 6).unwrap();
        let tr: Complex64 = (0..6)
            .flat_map(|p| (0..6).map(move |q| (p, q)))
            .map(|(p, q)| d.get(p, q, p, q))
            .sum();
        assert!((tr.re - 6.0).abs() < 1e-14);
    }

    #[test]
    fn create_annihilate_pair() {
        let s = prepare_determinant(&[1], 3).unwrap();
        let v = create(0, &annihilate(1, s.amplitudes()));
        assert_eq!(v[1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn register_mismatch() {
        let s = prepare_determinant(&[0], 4).unwrap();
        assert!(transition_2rdm(&s, &s, 6).is_err());
    }
}
