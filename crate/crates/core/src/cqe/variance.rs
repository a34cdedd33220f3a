use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qubit_map::PauliSum;
use crate::simulator::{apply_exponential, overlap, Statevector};

fn energy(state: &Statevector, h: &PauliSum) -> f64 {
    let hpsi = h.apply(state.amplitudes());
    state
        .amplitudes()
        .iter()
        .zip(&hpsi)
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>()
        .re
}

/// `<(H - E)^2>` with `E = <H>`, as the squared norm of `(H - E)|psi>`.
pub fn variance_exact(state: &Statevector, h: &PauliSum) -> f64 {
    let hpsi = h.apply(state.amplitudes());
    let e: f64 = state
        .amplitudes()
        .iter()
        .zip(&hpsi)
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>()
        .re;
    hpsi.iter()
        .zip(state.amplitudes())
        .map(|(hp, a)| (hp - a * e).norm_sqr())
        .sum()
}

/// `exp(i delta (H - E)) |psi>`.
pub fn auxiliary_state(state: &Statevector, h: &PauliSum, delta: f64) -> Result<Statevector> {
    if delta == 0.0 {
        return Err(Error::arg("auxiliary state needs a nonzero delta"));
    }
    let e = energy(state, h);
    let mut shifted = h.clone();
    shifted.add_term(Default::default(), Complex64::new(-e, 0.0));
    apply_exponential(state, &shifted.simplified(), Complex64::new(0.0, delta))
}

/// Second-order estimate `(1 - Re<psi|aux>) / (delta^2 / 2)`.
pub fn variance_taylor(state: &Statevector, aux: &Statevector, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::arg("variance estimate needs a nonzero delta"));
    }
    let ov = overlap(state, aux)?;
    Ok((1.0 - ov.re) / (delta * delta / 2.0))
}
