use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::simulator::Statevector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entangler {
    Cx,
    Cz,
}

impl std::str::FromStr for Entangler {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cx" => Ok(Entangler::Cx),
            "cz" => Ok(Entangler::Cz),
            _ => Err(Error::arg(format!("unknown entangler '{s}' (cx, cz)"))),
        }
    }
}

/// Alternating Y-rotation layers and nearest-neighbour entangler chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoLocalAnsatz {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub entangler: Entangler,
}

impl TwoLocalAnsatz {
    pub fn new(n_qubits: usize, n_layers: usize, entangler: Entangler) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::qubit_map::MAX_QUBITS {
            return Err(Error::arg(format!("ansatz on {n_qubits} qubits")));
        }
        Ok(Self {
            n_qubits,
            n_layers,
            entangler,
        })
    }

    pub fn parameter_count(&self) -> usize {
        self.n_qubits * (self.n_layers + 1)
    }

    /// Rotation layers, sequential chain gates, then basis change and readout.
    pub fn depth(&self) -> usize {
        let chain = self.n_qubits.saturating_sub(1);
        (self.n_layers + 1) + self.n_layers * chain + 2
    }

    pub fn state(&self, theta: &[f64]) -> Result<Statevector> {
        if theta.len() != self.parameter_count() {
            return Err(Error::arg(format!(
                "ansatz takes {} parameters, got {}",
                self.parameter_count(),
                theta.len()
            )));
        }
        let n = self.n_qubits;
        let mut amps = vec![0.0f64; 1 << n];
        amps[0] = 1.0;
        for l in 0..=self.n_layers {
            if l > 0 {
                for q in 0..n - 1 {
                    match self.entangler {
                        Entangler::Cx => cx(&mut amps, q, q + 1),
                        Entangler::Cz => cz(&mut amps, q, q + 1),
                    }
                }
            }
            for q in 0..n {
                ry(&mut amps, q, theta[l * n + q]);
            }
        }
        let amps = amps.into_iter().map(|a| Complex64::new(a, 0.0)).collect();
        Ok(Statevector::from_raw(n, amps))
    }
}

fn ry(amps: &mut [f64], q: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let bit = 1 << q;
    for b in 0..amps.len() {
        if b & bit == 0 {
            let (a0, a1) = (amps[b], amps[b | bit]);
            amps[b] = c * a0 - s * a1;
            amps[b | bit] = s * a0 + c * a1;
        }
    }
}

fn cx(amps: &mut [f64], control: usize, target: usize) {
    let (cb, tb) = (1 << control, 1 << target);
    for b in 0..amps.len() {
        if b & cb != 0 && b & tb == 0 {
            amps.swap(b, b | tb);
        }
    }
}

fn cz(amps: &mut [f64], a: usize, b: usize) {
    let mask = (1 << a) | (1 << b);
    for (i, x) in amps.iter_mut().enumerate() {
        if i & mask == mask {
            *x = -*x;
        }
    }
}
