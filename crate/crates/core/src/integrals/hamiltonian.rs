use num_complex::Complex64;

use super::fermion::{FermionOperator, Ladder};
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// Core energy plus one- and two-electron integrals over spatial orbitals.
///
/// `g_two` is stored in physicist ordering, `g(p, q, r, s) = <pq|rs>`.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularIntegrals {
    pub n_orbitals: usize,
    pub n_electrons: usize,
    pub sz: f64,
    pub core_energy: f64,
    h_one: Vec<f64>,
    g_two: Vec<f64>,
}

impl MolecularIntegrals {
    pub fn new(
        n_orbitals: usize,
        n_electrons: usize,
        sz: f64,
        core_energy: f64,
        h_one: Vec<f64>,
        g_two: Vec<f64>,
    ) -> Result<Self> {
        let n = n_orbitals;
        if h_one.len() != n * n || g_two.len() != n * n * n * n {
            return Err(Error::arg("integral tensor sizes do not match n_orbitals"));
        }
        if n_electrons > 2 * n {
            return Err(Error::arg(format!(
                "{n_electrons} electrons do not fit in {n} orbitals"
            )));
        }
        if (2.0 * sz).fract() != 0.0 || sz.abs() * 2.0 > n_electrons as f64 {
            return Err(Error::arg(format!("invalid spin projection {sz}")));
        }
        let ints = Self {
            n_orbitals,
            n_electrons,
            sz,
            core_energy,
            h_one,
            g_two,
        };
        ints.check_symmetry()?;
        Ok(ints)
    }

    /// Builds from chemist-ordered `(pq|rs)` values.
    pub fn from_chemist(
        n_orbitals: usize,
        n_electrons: usize,
        sz: f64,
        core_energy: f64,
        h_one: Vec<f64>,
        chem: &[f64],
    ) -> Result<Self> {
        let n = n_orbitals;
        let mut g = vec![0.0; n * n * n * n];
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        g[((p * n + r) * n + q) * n + s] = chem[((p * n + q) * n + r) * n + s];
                    }
                }
            }
        }
        Self::new(n_orbitals, n_electrons, sz, core_energy, h_one, g)
    }

    fn check_symmetry(&self) -> Result<()> {
        let n = self.n_orbitals;
        for p in 0..n {
            for q in 0..n {
                if (self.h(p, q) - self.h(q, p)).abs() > SYMMETRY_TOL {
                    return Err(Error::arg(format!("h_one not symmetric at ({p},{q})")));
                }
                for r in 0..n {
                    for s in 0..n {
                        let v = self.g(p, q, r, s);
                        let images = [
                            self.g(q, p, s, r),
                            self.g(r, s, p, q),
                            self.g(s, r, q, p),
                            self.g(r, q, p, s),
                            self.g(p, s, r, q),
                            self.g(s, p, q, r),
                            self.g(q, r, s, p),
                        ];
                        if images.iter().any(|w| (w - v).abs() > SYMMETRY_TOL) {
                            return Err(Error::arg(format!(
                                "g_two lacks 8-fold symmetry at ({p},{q},{r},{s})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_orbitals
    }

    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h_one[p * self.n_orbitals + q]
    }

    /// Physicist-ordered `<pq|rs>`.
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_orbitals;
        self.g_two[((p * n + q) * n + r) * n + s]
    }

    /// Chemist-ordered `(pq|rs)`.
    pub fn chem(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.g(p, r, q, s)
    }

    pub fn n_alpha(&self) -> usize {
        ((self.n_electrons as f64) / 2.0 + self.sz).round() as usize
    }

    pub fn n_beta(&self) -> usize {
        self.n_electrons - self.n_alpha()
    }
}

fn mode(p: usize, spin: usize) -> usize {
    2 * p + spin
}

/// Second-quantized Hamiltonian over interleaved spin orbitals (`2p` alpha,
/// `2p + 1` beta).
pub fn build_hamiltonian(ints: &MolecularIntegrals) -> FermionOperator {
    let n = ints.n_orbitals;
    let mut op = FermionOperator::identity(Complex64::new(ints.core_energy, 0.0));
    for p in 0..n {
        for q in 0..n {
            let h = ints.h(p, q);
            if h == 0.0 {
                continue;
            }
            for spin in 0..2 {
                op.add_product(
                    &[
                        Ladder::create(mode(p, spin)),
                        Ladder::annihilate(mode(q, spin)),
                    ],
                    Complex64::new(h, 0.0),
                );
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let g = ints.g(p, q, r, s);
                    if g == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            let (a, b, c, d) =
                                (mode(p, sigma), mode(q, tau), mode(s, tau), mode(r, sigma));
                            if a == b || c == d {
                                continue;
                            }
                            op.add_product(
                                &[
                                    Ladder::create(a),
                                    Ladder::create(b),
                                    Ladder::annihilate(c),
                                    Ladder::annihilate(d),
                                ],
                                Complex64::new(0.5 * g, 0.0),
                            );
                        }
                    }
                }
            }
        }
    }
    op.simplify();
    op
}

pub fn number_operator(n_spin_orbitals: usize) -> FermionOperator {
    let mut op = FermionOperator::zero();
    for j in 0..n_spin_orbitals {
        op.add_product(
            &[Ladder::create(j), Ladder::annihilate(j)],
            Complex64::new(1.0, 0.0),
        );
    }
    op
}

pub fn sz_operator(n_spin_orbitals: usize) -> FermionOperator {
    let mut op = FermionOperator::zero();
    for j in 0..n_spin_orbitals {
        let s = if j % 2 == 0 { 0.5 } else { -0.5 };
        op.add_product(
            &[Ladder::create(j), Ladder::annihilate(j)],
            Complex64::new(s, 0.0),
        );
    }
    op
}

/// `S^2 = S- S+ + Sz (Sz + 1)` on the interleaved register.
pub fn spin_squared_operator(n_spin_orbitals: usize) -> Result<FermionOperator> {
    if !n_spin_orbitals.is_multiple_of(2) {
        return Err(Error::arg(format!(
            "odd register size {n_spin_orbitals} has no spin pairing"
        )));
    }
    let n = n_spin_orbitals / 2;
    let mut s_plus = FermionOperator::zero();
    let mut s_minus = FermionOperator::zero();
    for p in 0..n {
        s_plus.add_product(
            &[Ladder::create(mode(p, 0)), Ladder::annihilate(mode(p, 1))],
            Complex64::new(1.0, 0.0),
        );
        s_minus.add_product(
            &[Ladder::create(mode(p, 1)), Ladder::annihilate(mode(p, 0))],
            Complex64::new(1.0, 0.0),
        );
    }
    let sz = sz_operator(n_spin_orbitals);
    let mut s2 = s_minus.mul(&s_plus);
    s2.add(&sz.mul(&sz));
    s2.add(&sz);
    s2.simplify();
    Ok(s2)
}

/// Energy from spin-orbital 1-RDM `d1[p][q] = <a+_p a_q>` and 2-RDM
/// `d2[p][q][s][t] = <a+_p a+_q a_t a_s>`, both flattened row-major.
pub fn energy_from_rdms(ints: &MolecularIntegrals, d1: &[Complex64], d2: &[Complex64]) -> f64 {
    let n = ints.n_orbitals;
    let m = 2 * n;
    let mut e = Complex64::new(ints.core_energy, 0.0);
    for p in 0..n {
        for q in 0..n {
            for spin in 0..2 {
                e += ints.h(p, q) * d1[mode(p, spin) * m + mode(q, spin)];
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let g = ints.g(p, q, r, s);
                    if g == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            let (a, b, c, d) =
                                (mode(p, sigma), mode(q, tau), mode(r, sigma), mode(s, tau));
                            e += 0.5 * g * d2[((a * m + b) * m + c) * m + d];
                        }
                    }
                }
            }
        }
    }
    e.re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_level(eps: f64, core: f64) -> MolecularIntegrals {
        MolecularIntegrals::new(1, 1, 0.5, core, vec![eps], vec![0.0]).unwrap()
    }

    #[test]
    fn single_level_hamiltonian() {
        let op = build_hamiltonian(&single_level(-0.7, 1.5));
        let mut expected = FermionOperator::identity(Complex64::new(1.5, 0.0));
        expected.add_product(
            &[Ladder::create(0), Ladder::annihilate(0)],
            Complex64::new(-0.7, 0.0),
        );
        expected.add_product(
            &[Ladder::create(1), Ladder::annihilate(1)],
            Complex64::new(-0.7, 0.0),
        );
        assert!(op.approx_eq(&expected, 1e-14));
    }

    #[test]
    fn rejects_asymmetric_h() {
        let err = MolecularIntegrals::new(2, 2, 0.0, 0.0, vec![0.0, 1.0, 0.5, 0.0], vec![0.0; 16]);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_too_many_electrons() {
        assert!(MolecularIntegrals::new(1, 3, 0.5, 0.0, vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn spin_squared_needs_even_register() {
        assert!(spin_squared_operator(3).is_err());
    }

    #[test]
    fn hamiltonian_is_hermitian_and_conserving() {
        let chem: Vec<f64> = (0..16)
            .map(|i| {
                let (p, q, r, s) = (i / 8, (i / 4) % 2, (i / 2) % 2, i % 2);
                let a = if p == q { 0.6 } else { 0.1 };
                let b = if r == s { 0.6 } else { 0.1 };
                a * b
            })
            .collect();
        let ints =
            MolecularIntegrals::from_chemist(2, 2, 0.0, 0.3, vec![-1.0, 0.1, 0.1, -0.4], &chem)
                .unwrap();
        let h = build_hamiltonian(&ints);
        assert!(h.is_hermitian(1e-12));
        assert!(h.number_violation() < 1e-12);
        assert!(h.sz_violation() < 1e-12);
    }
}
