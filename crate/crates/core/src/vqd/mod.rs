//! Variational quantum deflation.

mod ansatz;
mod optimize;

pub use ansatz::{Entangler, TwoLocalAnsatz};
pub use optimize::{
    optimizer_registry, Cobyla, Minimum, Objective, Optimizer, OptimizerContext, Rotosolve,
};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::qubit_map::PauliSum;
use crate::simulator::{expectation, overlap, MeasurementSettings, Statevector};

/// Converged states that later states are penalised against.
#[derive(Debug, Clone)]
pub struct DeflationContext {
    pub priors: Vec<Statevector>,
    pub beta: f64,
}

impl DeflationContext {
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::arg(format!(
                "penalty weight {beta} must be finite and >= 0"
            )));
        }
        Ok(Self {
            priors: Vec::new(),
            beta,
        })
    }

    /// Largest pairwise overlap among the priors.
    pub fn max_prior_overlap(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (i, a) in self.priors.iter().enumerate() {
            for b in &self.priors[i + 1..] {
                worst = worst.max(overlap(a, b)?.norm());
            }
        }
        Ok(worst)
    }

    pub fn penalty(&self, state: &Statevector) -> Result<f64> {
        let mut sum = 0.0;
        for p in &self.priors {
            sum += overlap(p, state)?.norm_sqr();
        }
        Ok(self.beta * sum)
    }
}

/// Twice the spectral-range bound `2 sum |c|` over the non-identity strings.
pub fn default_beta(h: &PauliSum) -> f64 {
    4.0 * h.one_norm_without_identity()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostTerms {
    pub cost: f64,
    pub energy: f64,
    pub penalty: f64,
}

pub fn vqd_cost(
    ansatz: &TwoLocalAnsatz,
    theta: &[f64],
    h: &PauliSum,
    ctx: &DeflationContext,
    settings: &MeasurementSettings,
) -> Result<CostTerms> {
    let state = ansatz.state(theta)?;
    let energy = expectation(&state, h, settings)?;
    let penalty = ctx.penalty(&state)?;
    Ok(CostTerms {
        cost: energy + penalty,
        energy,
        penalty,
    })
}

#[derive(Debug, Clone)]
pub struct VqdOptions {
    pub n_states: usize,
    /// Penalty weight; `None` uses [`default_beta`].
    pub beta: Option<f64>,
    pub budget: usize,
    pub seed: u64,
    pub measurement: MeasurementSettings,
}

impl Default for VqdOptions {
    fn default() -> Self {
        Self {
            n_states: 2,
            beta: None,
            budget: 400,
            seed: 0,
            measurement: MeasurementSettings::exact(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqdTraceRow {
    pub evaluation: usize,
    pub state: usize,
    pub cost: f64,
    pub energy: f64,
    pub penalty: f64,
}

#[derive(Debug, Clone)]
pub struct VqdState {
    pub energy: f64,
    pub state: Statevector,
    pub theta: Vec<f64>,
    pub converged: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct VqdRun {
    pub beta: f64,
    pub states: Vec<VqdState>,
    pub trace: Vec<VqdTraceRow>,
}

impl VqdRun {
    pub fn converged(&self) -> bool {
        self.states.iter().all(|s| s.converged)
    }
}

/// Optimises states `0..n_states` in turn, each penalised against the ones
/// before it.
pub fn vqd_solve(
    h: &PauliSum,
    ansatz: &TwoLocalAnsatz,
    optimizer: &dyn Optimizer,
    options: &VqdOptions,
) -> Result<VqdRun> {
    if options.n_states == 0 {
        return Err(Error::arg("vqd needs at least one state"));
    }
    if h.n_qubits() != ansatz.n_qubits {
        return Err(Error::arg(format!(
            "hamiltonian on {} qubits, ansatz on {}",
            h.n_qubits(),
            ansatz.n_qubits
        )));
    }
    let beta = options.beta.unwrap_or_else(|| default_beta(h));
    let mut ctx = DeflationContext::new(beta)?;
    let mut rng = ChaCha20Rng::seed_from_u64(options.seed);
    let kick = Normal::new(0.0, 0.1).expect("valid normal");
    let mut trace = Vec::new();
    let mut states = Vec::with_capacity(options.n_states);
    for k in 0..options.n_states {
        let x0: Vec<f64> = if k == 0 {
            vec![0.0; ansatz.parameter_count()]
        } else {
            (0..ansatz.parameter_count())
                .map(|_| kick.sample(&mut rng))
                .collect()
        };
        let mut failure = None;
        let mut evaluation = 0usize;
        let mut objective = |theta: &[f64]| -> f64 {
            let mut settings = options.measurement;
            settings.seed = options
                .measurement
                .seed
                .wrapping_add(((k as u64) << 32) | evaluation as u64);
            evaluation += 1;
            match vqd_cost(ansatz, theta, h, &ctx, &settings) {
                Ok(t) => {
                    trace.push(VqdTraceRow {
                        evaluation,
                        state: k,
                        cost: t.cost,
                        energy: t.energy,
                        penalty: t.penalty,
                    });
                    t.cost
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            }
        };
        let min = optimizer.minimize(&mut objective, &x0, options.budget)?;
        if let Some(e) = failure {
            return Err(e);
        }
        let state = ansatz.state(&min.x)?;
        let energy = expectation(&state, h, &options.measurement)?;
        ctx.priors.push(state.clone());
        states.push(VqdState {
            energy,
            state,
            theta: min.x,
            converged: min.converged,
            evaluations: min.evaluations,
        });
    }
    Ok(VqdRun {
        beta,
        states,
        trace,
    })
}
