use num_complex::Complex64;

use super::variance::auxiliary_state;
use crate::error::{Error, Result};
use crate::integrals::{FermionOperator, Ladder};
use crate::qubit_map::{PauliSum, QubitMapping};
use crate::simulator::{transition_2rdm, Statevector, Tensor4};

fn conserves_sz(p: usize, q: usize, s: usize, t: usize) -> bool {
    p % 2 + q % 2 == s % 2 + t % 2
}

fn quadruples(n: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..n).flat_map(move |p| {
        (p + 1..n).flat_map(move |q| {
            (0..n).flat_map(move |s| {
                (s + 1..n)
                    .filter(move |&t| conserves_sz(p, q, s, t))
                    .map(move |t| (p, q, s, t))
            })
        })
    })
}

/// Two-body anti-Hermitian generator `sum_{p<q, s<t} F[pqst] a+_p a+_q a_t a_s`.
#[derive(Debug, Clone)]
pub struct TwoBodyGenerator {
    coeffs: Tensor4,
}

impl TwoBodyGenerator {
    pub fn from_tensor(coeffs: Tensor4) -> Self {
        Self { coeffs }
    }

    pub fn n_spin_orbitals(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn tensor(&self) -> &Tensor4 {
        &self.coeffs
    }

    pub fn get(&self, p: usize, q: usize, s: usize, t: usize) -> Complex64 {
        self.coeffs.get(p, q, s, t)
    }

    /// Frobenius norm over the independent `p<q, s<t` entries.
    pub fn norm(&self) -> f64 {
        quadruples(self.n_spin_orbitals())
            .map(|(p, q, s, t)| self.get(p, q, s, t).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `max |F[pqst] + conj(F[stpq])|`.
    pub fn anti_hermiticity_defect(&self) -> f64 {
        quadruples(self.n_spin_orbitals())
            .map(|(p, q, s, t)| (self.get(p, q, s, t) + self.get(s, t, p, q).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_fermion_operator(&self) -> FermionOperator {
        let mut op = FermionOperator::zero();
        for (p, q, s, t) in quadruples(self.n_spin_orbitals()) {
            let c = self.get(p, q, s, t);
            if c.norm() > 0.0 {
                op.add_product(
                    &[
                        Ladder::create(p),
                        Ladder::create(q),
                        Ladder::annihilate(t),
                        Ladder::annihilate(s),
                    ],
                    c,
                );
            }
        }
        op
    }
}

/// Qubit images of every `a+_p a+_q a_t a_s` the generator can contain.
pub struct GeneratorBasis {
    n_spin_orbitals: usize,
    n_qubits: usize,
    images: Vec<((usize, usize, usize, usize), PauliSum)>,
}

impl GeneratorBasis {
    pub fn new(mapping: &dyn QubitMapping) -> Result<Self> {
        let n = mapping.n_spin_orbitals();
        let images = quadruples(n)
            .map(|(p, q, s, t)| {
                let mut op = FermionOperator::zero();
                op.add_product(
                    &[
                        Ladder::create(p),
                        Ladder::create(q),
                        Ladder::annihilate(t),
                        Ladder::annihilate(s),
                    ],
                    Complex64::new(1.0, 0.0),
                );
                mapping.map(&op).map(|img| ((p, q, s, t), img))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n_spin_orbitals: n,
            n_qubits: mapping.n_qubits(),
            images,
        })
    }

    pub fn n_spin_orbitals(&self) -> usize {
        self.n_spin_orbitals
    }

    pub fn map(&self, generator: &TwoBodyGenerator) -> Result<PauliSum> {
        if generator.n_spin_orbitals() != self.n_spin_orbitals {
            return Err(Error::arg(format!(
                "generator on {} spin orbitals, basis has {}",
                generator.n_spin_orbitals(),
                self.n_spin_orbitals
            )));
        }
        let mut out = PauliSum::zero(self.n_qubits);
        for &((p, q, s, t), ref img) in &self.images {
            let c = generator.get(p, q, s, t);
            if c.norm() > 0.0 {
                out.add_scaled(img, c);
            }
        }
        out.simplify();
        Ok(out)
    }
}

/// Residual generator from the auxiliary states `exp(+-i delta (H - E))|psi>`.
///
/// The odd-in-delta parts of the two transition RDMs cancel, leaving
/// `F = -conj(<[(H - E)^2, a+_p a+_q a_t a_s]>)` up to `O(delta^2)`.
pub fn residual_generator(
    state: &Statevector,
    aux_plus: &Statevector,
    aux_minus: &Statevector,
    delta: f64,
    mapping: &dyn QubitMapping,
) -> Result<TwoBodyGenerator> {
    if delta == 0.0 {
        return Err(Error::arg("residual needs a nonzero delta"));
    }
    let n = mapping.n_spin_orbitals();
    let ket = mapping.to_fock(state)?;
    let dp = transition_2rdm(&mapping.to_fock(aux_plus)?, &ket, n)?;
    let dm = transition_2rdm(&mapping.to_fock(aux_minus)?, &ket, n)?;
    let anti = |d: &Tensor4, p, q, s, t| 0.5 * (d.get(p, q, s, t) - d.get(s, t, p, q).conj());
    let scale = 4.0 / (delta * delta);
    let mut f = Tensor4::zeros(n);
    for (p, q, s, t) in quadruples(n) {
        let even = 0.5 * (anti(&dp, p, q, s, t) + anti(&dm, p, q, s, t));
        f.set(p, q, s, t, scale * even.conj());
    }
    Ok(TwoBodyGenerator::from_tensor(f))
}

/// Builds both auxiliary states and returns the residual generator.
pub fn residual_from_state(
    state: &Statevector,
    h: &PauliSum,
    delta: f64,
    mapping: &dyn QubitMapping,
) -> Result<TwoBodyGenerator> {
    let plus = auxiliary_state(state, h, delta)?;
    let minus = auxiliary_state(state, h, -delta)?;
    residual_generator(state, &plus, &minus, delta, mapping)
}

#[derive(Debug, Clone)]
pub struct TruncatedGenerator {
    pub operator: PauliSum,
    pub retained: usize,
    pub total: usize,
}

/// Qubit image of the generator with strings of `|c| < threshold` removed,
/// keeping at most `max_terms` of the largest.
pub fn truncate_generator(
    generator: &TwoBodyGenerator,
    threshold: f64,
    max_terms: Option<usize>,
    basis: &GeneratorBasis,
) -> Result<TruncatedGenerator> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::arg(format!(
            "truncation threshold {threshold} is negative"
        )));
    }
    let full = basis.map(generator)?;
    let total = full.len();
    let mut kept: Vec<_> = full
        .terms()
        .filter(|(_, c)| c.norm() >= threshold)
        .collect();
    if let Some(cap) = max_terms {
        kept.sort_by(|a, b| b.1.norm().total_cmp(&a.1.norm()).then(a.0.cmp(&b.0)));
        kept.truncate(cap);
    }
    let mut operator = PauliSum::zero(full.n_qubits());
    for (k, c) in &kept {
        operator.add_term(*k, *c);
    }
    Ok(TruncatedGenerator {
        retained: operator.len(),
        operator,
        total,
    })
}
