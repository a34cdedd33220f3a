use num_complex::Complex64;

use super::generator::{residual_from_state, truncate_generator, GeneratorBasis};
use super::variance::variance_exact;
use crate::error::{Error, Result};
use crate::qubit_map::{PauliSum, QubitMapping};
use crate::simulator::{apply_exponential, expectation, overlap, MeasurementSettings, Statevector};

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const LINE_TOL: f64 = 1e-10;
const LINE_MAX_ITER: usize = 200;
const STALL_NORM: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct LineSearch {
    pub epsilon: f64,
    pub variance: f64,
    pub state: Statevector,
}

/// Golden-section minimisation of the variance of `exp(eps G)|psi>` over
/// `bracket`; returns `eps = 0` if no point improves on the input.
pub fn line_search_epsilon(
    state: &Statevector,
    generator: &PauliSum,
    h: &PauliSum,
    bracket: (f64, f64),
) -> Result<LineSearch> {
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::arg(format!(
            "degenerate line-search bracket [{lo}, {hi}]"
        )));
    }
    if generator.one_norm() == 0.0 {
        return Err(Error::arg("line search along a vanishing generator"));
    }
    let eval = |eps: f64| -> Result<(f64, Statevector)> {
        let s = apply_exponential(state, generator, Complex64::new(eps, 0.0))?;
        Ok((variance_exact(&s, h), s))
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = eval(c)?.0;
    let mut fd = eval(d)?.0;
    let width = hi - lo;
    for _ in 0..LINE_MAX_ITER {
        if b - a < LINE_TOL * width {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = eval(c)?.0;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = eval(d)?.0;
        }
    }
    let eps = 0.5 * (a + b);
    let (var, s) = eval(eps)?;
    let var0 = variance_exact(state, h);
    if var0 <= var {
        return Ok(LineSearch {
            epsilon: 0.0,
            variance: var0,
            state: state.clone(),
        });
    }
    Ok(LineSearch {
        epsilon: eps,
        variance: var,
        state: s,
    })
}

#[derive(Debug, Clone)]
pub struct CqeOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub delta: f64,
    /// Drop generator strings below `min(0.1, sqrt(variance))`.
    pub truncate: bool,
    pub max_terms: Option<usize>,
    pub measurement: MeasurementSettings,
}

impl Default for CqeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 30,
            delta: 0.01,
            truncate: false,
            max_terms: None,
            measurement: MeasurementSettings::exact(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CqeIterate {
    pub iteration: usize,
    pub energy: f64,
    pub variance: f64,
    pub epsilon: f64,
    pub generator_norm: f64,
    pub retained_terms: usize,
}

#[derive(Debug, Clone)]
pub struct CqeRun {
    pub state: Statevector,
    pub energy: f64,
    pub variance: f64,
    pub converged: bool,
    pub trace: Vec<CqeIterate>,
}

impl CqeRun {
    pub fn iterations(&self) -> usize {
        self.trace.last().map_or(0, |r| r.iteration)
    }
}

fn measured_energy(
    state: &Statevector,
    h: &PauliSum,
    m: &MeasurementSettings,
    it: usize,
) -> Result<f64> {
    let mut settings = *m;
    settings.seed = m.seed.wrapping_add(it as u64);
    expectation(state, h, &settings)
}

/// Iterates `|psi> <- exp(eps F)|psi>` with the residual generator `F` until
/// the variance drops below `tol`.
pub fn cqe_solve(
    h: &PauliSum,
    mapping: &dyn QubitMapping,
    initial: &Statevector,
    options: &CqeOptions,
) -> Result<CqeRun> {
    if options.delta == 0.0 || !options.delta.is_finite() {
        return Err(Error::arg(format!("invalid delta {}", options.delta)));
    }
    if h.n_qubits() != mapping.n_qubits() || initial.n_qubits() != mapping.n_qubits() {
        return Err(Error::arg(format!(
            "register mismatch: hamiltonian {}, state {}, mapping {} qubits",
            h.n_qubits(),
            initial.n_qubits(),
            mapping.n_qubits()
        )));
    }
    let basis = GeneratorBasis::new(mapping)?;
    let mut state = initial.clone();
    let mut variance = variance_exact(&state, h);
    let mut trace = vec![CqeIterate {
        iteration: 0,
        energy: measured_energy(&state, h, &options.measurement, 0)?,
        variance,
        epsilon: 0.0,
        generator_norm: 0.0,
        retained_terms: 0,
    }];
    for it in 1..=options.max_iter {
        if variance < options.tol {
            break;
        }
        let f = residual_from_state(&state, h, options.delta, mapping)?;
        let norm = f.norm();
        if norm < STALL_NORM {
            break;
        }
        let threshold = if options.truncate {
            variance.sqrt().min(0.1)
        } else {
            0.0
        };
        let g = truncate_generator(&f, threshold, options.max_terms, &basis)?;
        let step = if g.retained == 0 {
            None
        } else {
            let half = 0.5 / norm;
            Some(line_search_epsilon(&state, &g.operator, h, (-half, half))?)
        };
        let epsilon = match step {
            Some(ls) => {
                state = ls.state;
                variance = ls.variance;
                ls.epsilon
            }
            None => 0.0,
        };
        trace.push(CqeIterate {
            iteration: it,
            energy: measured_energy(&state, h, &options.measurement, it)?,
            variance,
            epsilon,
            generator_norm: norm,
            retained_terms: g.retained,
        });
        if epsilon == 0.0 {
            break;
        }
    }
    let energy = trace.last().expect("trace starts non-empty").energy;
    Ok(CqeRun {
        converged: variance < options.tol,
        state,
        energy,
        variance,
        trace,
    })
}

/// `|<a|b>|^2` and whether it is below `tol`.
pub fn orthogonality_check(a: &Statevector, b: &Statevector, tol: f64) -> Result<(f64, bool)> {
    let o = overlap(a, b)?.norm_sqr();
    Ok((o, o < tol))
}
