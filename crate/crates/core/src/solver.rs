//! Eigensolvers selectable by name.

use crate::cqe::{cqe_solve, CqeIterate, CqeOptions};
use crate::error::{Error, Result};
use crate::exact::diagonalize_mapped_sector;
use crate::qubit_map::{PauliSum, QubitMapping, SymmetrySector};
use crate::registry::Registry;
use crate::simulator::{
    prepare_determinant, prepare_open_shell_singlet, s_squared, MeasurementSettings, OpenShellPair,
    Statevector,
};
use crate::vqd::{
    optimizer_registry, vqd_solve, Entangler, OptimizerContext, TwoLocalAnsatz, VqdOptions,
    VqdTraceRow,
};

/// A mapped Hamiltonian and the states wanted from it.
pub struct Problem<'a> {
    pub hamiltonian: &'a PauliSum,
    pub mapping: &'a dyn QubitMapping,
    pub sector: SymmetrySector,
    pub n_states: usize,
    /// Starting states on the occupation-number register; `None` uses
    /// [`default_guesses`].
    pub guesses: Option<Vec<Statevector>>,
}

#[derive(Debug, Clone)]
pub struct SolverContext {
    pub tol: f64,
    pub max_iter: usize,
    pub measurement: MeasurementSettings,
    pub seed: u64,
    pub optimizer: String,
    pub budget: usize,
    pub beta: Option<f64>,
    pub layers: usize,
    pub entangler: Entangler,
    pub truncate: bool,
    pub max_terms: Option<usize>,
    pub guess: GuessKind,
}

impl Default for SolverContext {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 30,
            measurement: MeasurementSettings::exact(),
            seed: 0,
            optimizer: "cobyla".into(),
            budget: 400,
            beta: None,
            layers: 4,
            entangler: Entangler::Cx,
            truncate: false,
            max_terms: None,
            guess: GuessKind::Singlet,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StateSolution {
    pub energy: f64,
    /// On the mapping's register.
    pub state: Statevector,
    pub s_squared: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub enum SolverTrace {
    None,
    Cqe(Vec<Vec<CqeIterate>>),
    Vqd(Vec<VqdTraceRow>),
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub states: Vec<StateSolution>,
    pub trace: SolverTrace,
}

impl Solution {
    pub fn converged(&self) -> bool {
        self.states.iter().all(|s| s.converged)
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }
}

pub trait Eigensolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, problem: &Problem<'_>) -> Result<Solution>;
}

fn spin(state: &Statevector, mapping: &dyn QubitMapping) -> Result<f64> {
    s_squared(&mapping.to_fock(state)?, mapping.n_spin_orbitals())
}

/// Form of the excited-state starting configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuessKind {
    /// Spin-adapted open-shell singlets.
    Singlet,
    /// Bare single determinants with the alpha electron promoted.
    Determinant,
}

impl std::str::FromStr for GuessKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "singlet" => Ok(GuessKind::Singlet),
            "determinant" => Ok(GuessKind::Determinant),
            _ => Err(Error::arg(format!(
                "unknown guess kind '{s}' (singlet, determinant)"
            ))),
        }
    }
}

/// Aufbau determinant followed by open-shell singlet promotions `i -> a`,
/// highest occupied first, lowest virtual first.
pub fn default_guesses(
    n_spin_orbitals: usize,
    sector: SymmetrySector,
    count: usize,
) -> Result<Vec<Statevector>> {
    initial_guesses(n_spin_orbitals, sector, count, GuessKind::Singlet)
}

/// Aufbau determinant followed by promotions `i -> a` of the requested kind,
/// highest occupied first, lowest virtual first.
pub fn initial_guesses(
    n_spin_orbitals: usize,
    sector: SymmetrySector,
    count: usize,
    kind: GuessKind,
) -> Result<Vec<Statevector>> {
    sector.validate(n_spin_orbitals)?;
    let (na, nb) = (sector.n_alpha(), sector.n_beta());
    let mut aufbau: Vec<usize> = (0..na)
        .map(|p| 2 * p)
        .chain((0..nb).map(|p| 2 * p + 1))
        .collect();
    aufbau.sort_unstable();
    let mut out = vec![prepare_determinant(&aufbau, n_spin_orbitals)?];
    if na == nb {
        let n_orb = n_spin_orbitals / 2;
        'outer: for i in (0..na).rev() {
            for a in na..n_orb {
                if out.len() >= count {
                    break 'outer;
                }
                let state = match kind {
                    GuessKind::Singlet => {
                        let closed: Vec<usize> =
                            aufbau.iter().copied().filter(|&j| j / 2 != i).collect();
                        prepare_open_shell_singlet(
                            &closed,
                            OpenShellPair::promote(i, a),
                            n_spin_orbitals,
                        )?
                    }
                    GuessKind::Determinant => {
                        let mut occ: Vec<usize> =
                            aufbau.iter().copied().filter(|&j| j != 2 * i).collect();
                        occ.push(2 * a);
                        occ.sort_unstable();
                        prepare_determinant(&occ, n_spin_orbitals)?
                    }
                };
                out.push(state);
            }
        }
    }
    if out.len() < count {
        return Err(Error::arg(format!(
            "only {} initial guesses available for {count} states",
            out.len()
        )));
    }
    out.truncate(count);
    Ok(out)
}

pub struct ExactSolver;

impl Eigensolver for ExactSolver {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn solve(&self, problem: &Problem<'_>) -> Result<Solution> {
        let spectrum = diagonalize_mapped_sector(
            problem.hamiltonian,
            problem.mapping,
            problem.sector,
            problem.n_states,
        )?;
        let labels = spectrum.sector_labels.unwrap_or_default();
        let states = spectrum
            .energies
            .into_iter()
            .zip(spectrum.states)
            .zip(labels)
            .map(|((energy, state), l)| StateSolution {
                energy,
                state,
                s_squared: l.s_squared,
                converged: true,
            })
            .collect();
        Ok(Solution {
            states,
            trace: SolverTrace::None,
        })
    }
}

pub struct CqeSolver {
    pub options: CqeOptions,
    pub guess: GuessKind,
}

impl Eigensolver for CqeSolver {
    fn name(&self) -> &'static str {
        "cqe"
    }

    fn solve(&self, problem: &Problem<'_>) -> Result<Solution> {
        let mapping = problem.mapping;
        let guesses = match &problem.guesses {
            Some(g) if g.len() >= problem.n_states => g[..problem.n_states].to_vec(),
            Some(g) => {
                return Err(Error::arg(format!(
                    "{} initial guesses for {} states",
                    g.len(),
                    problem.n_states
                )))
            }
            None => initial_guesses(
                mapping.n_spin_orbitals(),
                problem.sector,
                problem.n_states,
                self.guess,
            )?,
        };
        let runs = guesses
            .iter()
            .map(|g| {
                let start = mapping.from_fock(g)?;
                cqe_solve(problem.hamiltonian, mapping, &start, &self.options)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut states = Vec::with_capacity(runs.len());
        let mut traces = Vec::with_capacity(runs.len());
        for run in runs {
            states.push(StateSolution {
                energy: run.energy,
                s_squared: spin(&run.state, mapping)?,
                state: run.state,
                converged: run.converged,
            });
            traces.push(run.trace);
        }
        Ok(Solution {
            states,
            trace: SolverTrace::Cqe(traces),
        })
    }
}

pub struct VqdSolver {
    pub ansatz_layers: usize,
    pub entangler: Entangler,
    pub optimizer: String,
    pub tol: f64,
    pub options: VqdOptions,
}

impl Eigensolver for VqdSolver {
    fn name(&self) -> &'static str {
        "vqd"
    }

    fn solve(&self, problem: &Problem<'_>) -> Result<Solution> {
        let ansatz = TwoLocalAnsatz::new(
            problem.mapping.n_qubits(),
            self.ansatz_layers,
            self.entangler,
        )?;
        let optimizer =
            optimizer_registry().create(&self.optimizer, &OptimizerContext { tol: self.tol })?;
        let options = VqdOptions {
            n_states: problem.n_states,
            ..self.options.clone()
        };
        let run = vqd_solve(problem.hamiltonian, &ansatz, optimizer.as_ref(), &options)?;
        let states = run
            .states
            .into_iter()
            .map(|s| {
                Ok(StateSolution {
                    energy: s.energy,
                    s_squared: spin(&s.state, problem.mapping)?,
                    state: s.state,
                    converged: s.converged,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Solution {
            states,
            trace: SolverTrace::Vqd(run.trace),
        })
    }
}

fn make_exact(_: &SolverContext) -> Result<Box<dyn Eigensolver>> {
    Ok(Box::new(ExactSolver))
}

fn make_cqe(ctx: &SolverContext) -> Result<Box<dyn Eigensolver>> {
    Ok(Box::new(CqeSolver {
        options: CqeOptions {
            tol: ctx.tol,
            max_iter: ctx.max_iter,
            truncate: ctx.truncate,
            max_terms: ctx.max_terms,
            measurement: ctx.measurement,
            ..CqeOptions::default()
        },
        guess: ctx.guess,
    }))
}

fn make_vqd(ctx: &SolverContext) -> Result<Box<dyn Eigensolver>> {
    optimizer_registry().create(&ctx.optimizer, &OptimizerContext::default())?;
    Ok(Box::new(VqdSolver {
        ansatz_layers: ctx.layers,
        entangler: ctx.entangler,
        optimizer: ctx.optimizer.clone(),
        tol: 1e-6,
        options: VqdOptions {
            n_states: 1,
            beta: ctx.beta,
            budget: ctx.budget,
            seed: ctx.seed,
            measurement: ctx.measurement,
        },
    }))
}

pub fn solver_registry() -> Registry<dyn Eigensolver, SolverContext> {
    Registry::new("solver")
        .with("exact", make_exact)
        .with("cqe", make_cqe)
        .with("vqd", make_vqd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::{build_hamiltonian, read_fcidump};
    use crate::qubit_map::{mapping_registry, MappingContext};

    #[test]
    fn guesses_for_bundled_system() {
        let g = default_guesses(6, SymmetrySector::new(4, 0.0), 3).unwrap();
        assert_eq!(g[0].amplitudes()[0b001111].re, 1.0);
        assert!((s_squared(&g[1], 6).unwrap()).abs() < 1e-12);
        assert_eq!(g.len(), 3);
        assert!(default_guesses(6, SymmetrySector::new(4, 0.0), 9).is_err());
        let bare =
            initial_guesses(6, SymmetrySector::new(4, 0.0), 2, GuessKind::Determinant).unwrap();
        assert_eq!(bare[1].amplitudes()[0b011011].re, 1.0);
        assert!((s_squared(&bare[1], 6).unwrap() - 1.0).abs() < 1e-12);
        assert!("triplet".parse::<GuessKind>().is_err());
    }

    #[test]
    fn exact_and_cqe_agree_on_both_mappings() {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/cas43.fcidump");
        let op = build_hamiltonian(&read_fcidump(path).unwrap());
        let sector = SymmetrySector::new(4, 0.0);
        let solvers = solver_registry();
        for name in ["jw", "parity-tapered"] {
            let mapping = mapping_registry()
                .create(
                    name,
                    &MappingContext {
                        n_spin_orbitals: 6,
                        sector,
                    },
                )
                .unwrap();
            let h = mapping.map(&op).unwrap();
            let problem = Problem {
                hamiltonian: &h,
                mapping: mapping.as_ref(),
                sector,
                n_states: 2,
                guesses: None,
            };
            let ctx = SolverContext::default();
            let exact = solvers
                .create("exact", &ctx)
                .unwrap()
                .solve(&problem)
                .unwrap();
            let cqe = solvers
                .create("cqe", &ctx)
                .unwrap()
                .solve(&problem)
                .unwrap();
            assert!(cqe.converged(), "{name}");
            for (a, b) in exact.energies().iter().zip(cqe.energies()) {
                assert!((a - b).abs() < 1e-6, "{name}: {a} vs {b}");
            }
            assert!(exact.states[1].s_squared.abs() < 1e-6);
        }
    }

    #[test]
    fn unknown_optimizer_rejected() {
        let ctx = SolverContext {
            optimizer: "adam".into(),
            ..Default::default()
        };
        assert!(solver_registry().create("vqd", &ctx).is_err());
        assert!(solver_registry().create("dmrg", &ctx).is_err());
    }
}
