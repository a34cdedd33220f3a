use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use super::statevector::Statevector;
use crate::error::{Error, Result};
use crate::qubit_map::{PauliKey, PauliSum};

const HERMITICITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Sampled(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementSettings {
    pub shots: Shots,
    pub seed: u64,
}

impl MeasurementSettings {
    pub fn exact() -> Self {
        Self {
            shots: Shots::Exact,
            seed: 0,
        }
    }

    pub fn sampled(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::arg("shots must be at least 1"));
        }
        Ok(Self {
            shots: Shots::Sampled(shots),
            seed,
        })
    }

    pub fn is_exact(&self) -> bool {
        self.shots == Shots::Exact
    }
}

fn pauli_expectation(state: &Statevector, key: PauliKey) -> f64 {
    let amps = state.amplitudes();
    let mut acc = Complex64::default();
    for (b, a) in amps.iter().enumerate() {
        let partner = amps[b ^ key.x as usize];
        acc += partner.conj() * key.phase_on(b as u64) * a;
    }
    acc.re
}

fn check(state: &Statevector, observable: &PauliSum) -> Result<()> {
    if observable.n_qubits() != state.n_qubits() {
        return Err(Error::arg(format!(
            "observable on {} qubits, state on {}",
            observable.n_qubits(),
            state.n_qubits()
        )));
    }
    let defect = observable.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::Contract(format!(
            "observable is not Hermitian (defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// `(key, coefficient, <P>)` for every term, canonical order.
pub fn term_expectations(state: &Statevector, observable: &PauliSum) -> Vec<(PauliKey, f64, f64)> {
    observable
        .strings()
        .par_iter()
        .map(|p| (p.key, p.coeff.re, pauli_expectation(state, p.key)))
        .collect()
}

/// Exact or shot-sampled `<state|observable|state>`.
///
/// In sampled mode every non-identity term is measured independently with
/// `shots` draws from its +/-1 outcome distribution. Term `k` draws from the
/// ChaCha stream `k` of `seed`, so results do not depend on scheduling.
pub fn expectation(
    state: &Statevector,
    observable: &PauliSum,
    settings: &MeasurementSettings,
) -> Result<f64> {
    check(state, observable)?;
    let terms = term_expectations(state, observable);
    match settings.shots {
        Shots::Exact => Ok(terms.iter().map(|(_, c, e)| c * e).sum()),
        Shots::Sampled(shots) => {
            let seed = settings.seed;
            let estimates: Vec<f64> = terms
                .par_iter()
                .enumerate()
                .map(|(k, &(key, c, e))| {
                    if key.is_identity() {
                        return c;
                    }
                    let p = ((1.0 + e) / 2.0).clamp(0.0, 1.0);
                    let mut rng = ChaCha20Rng::seed_from_u64(seed);
                    rng.set_stream(k as u64);
                    let ups = Binomial::new(shots, p)
                        .expect("probability in [0, 1]")
                        .sample(&mut rng);
                    c * (2.0 * ups as f64 / shots as f64 - 1.0)
                })
                .collect();
            Ok(estimates.iter().sum())
        }
    }
}

/// Analytic standard error of the sampled estimator:
/// `sqrt(sum_k c_k^2 (1 - <P_k>^2) / shots)`.
pub fn sampled_standard_error(
    state: &Statevector,
    observable: &PauliSum,
    shots: u64,
) -> Result<f64> {
    check(state, observable)?;
    let var: f64 = term_expectations(state, observable)
        .iter()
        .filter(|(k, _, _)| !k.is_identity())
        .map(|(_, c, e)| c * c * (1.0 - e * e).max(0.0))
        .sum();
    Ok((var / shots as f64).sqrt())
}
