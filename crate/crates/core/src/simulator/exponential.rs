use num_complex::Complex64;

use super::statevector::Statevector;
use crate::error::{Error, Result};
use crate::qubit_map::PauliSum;

const HERMITICITY_TOL: f64 = 1e-8;
const STEP_NORM: f64 = 0.5;
const MAX_ORDER: usize = 80;

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `exp(scale * generator) |state>` by a scaled Taylor series summed to
/// double precision. `scale * generator` must be anti-Hermitian.
pub fn apply_exponential(
    state: &Statevector,
    generator: &PauliSum,
    scale: Complex64,
) -> Result<Statevector> {
    if generator.n_qubits() != state.n_qubits() {
        return Err(Error::arg(format!(
            "generator on {} qubits applied to {}-qubit state",
            generator.n_qubits(),
            state.n_qubits()
        )));
    }
    let defect = generator
        .terms()
        .map(|(_, c)| (scale * c).re.abs())
        .fold(0.0, f64::max);
    if defect > HERMITICITY_TOL {
        return Err(Error::Contract(format!(
            "effective generator is not anti-Hermitian (defect {defect:.3e})"
        )));
    }
    let bound = scale.norm() * generator.one_norm();
    if bound == 0.0 {
        return Ok(state.clone());
    }
    let steps = (bound / STEP_NORM).ceil().max(1.0) as usize;
    let mut op = generator.scaled(scale / steps as f64);
    // drop the Hermitian residue below tolerance
    let cleaned: Vec<_> = op
        .terms()
        .map(|(k, c)| (k, Complex64::new(0.0, c.im)))
        .collect();
    op = PauliSum::zero(op.n_qubits());
    for (k, c) in cleaned {
        op.add_term(k, c);
    }

    let mut v = state.amplitudes().to_vec();
    let mut term = vec![Complex64::default(); v.len()];
    let mut next = vec![Complex64::default(); v.len()];
    for _ in 0..steps {
        term.copy_from_slice(&v);
        for k in 1..=MAX_ORDER {
            op.apply_into(&term, &mut next);
            let inv = 1.0 / k as f64;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * inv;
            }
            for (a, t) in v.iter_mut().zip(&term) {
                *a += t;
            }
            if norm(&term) <= f64::EPSILON * 1e-2 {
                break;
            }
        }
    }
    Ok(Statevector::from_raw(state.n_qubits(), v))
}
