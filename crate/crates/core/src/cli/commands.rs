use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use serde_json::json;

use super::{Outcome, RunConfig};
use crate::ci_tools::{
    backend_registry, gh_vectors_model, meci_optimize, scan_surface, BackendContext,
    BranchingPlane, EnergyBackend, IntegralProvider, MeciOptions,
};
use crate::error::{Error, Result};
use crate::integrals::{
    build_hamiltonian, read_fcidump, MolecularIntegrals, VibronicEmbedding, VibronicModel,
};
use crate::qubit_map::{mapping_registry, MappingContext, SymmetrySector};
use crate::simulator::prepare_determinant;
use crate::solver::{solver_registry, Problem, SolverContext, SolverTrace};

const SCAN_SUCCESS_FRACTION: f64 = 0.95;

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

fn solver_context(cfg: &RunConfig) -> Result<SolverContext> {
    let defaults = SolverContext::default();
    Ok(SolverContext {
        tol: cfg.tol.unwrap_or(defaults.tol),
        max_iter: cfg.max_iter.unwrap_or(defaults.max_iter),
        measurement: cfg.measurement()?,
        seed: cfg.seed.unwrap_or(0),
        optimizer: cfg.optimizer.clone().unwrap_or(defaults.optimizer),
        budget: cfg.budget.unwrap_or(defaults.budget),
        beta: cfg.beta,
        truncate: cfg.truncate.unwrap_or(false),
        guess: match &cfg.guess {
            Some(g) => g.parse()?,
            None => defaults.guess,
        },
        ..defaults
    })
}

fn read_model(path: &Path) -> Result<VibronicModel> {
    VibronicModel::read(path)
}

fn geometry_or_origin(cfg: &RunConfig, dim: usize) -> Result<Vec<f64>> {
    let x = cfg.geometry.clone().unwrap_or_else(|| vec![0.0; dim]);
    if x.len() != dim {
        return Err(Error::arg(format!(
            "geometry has {} coordinates, model has {dim}",
            x.len()
        )));
    }
    Ok(x)
}

/// Integrals plus preferred starting determinants.
fn load_system(cfg: &RunConfig) -> Result<(MolecularIntegrals, Option<Vec<Vec<usize>>>)> {
    match (&cfg.fcidump, &cfg.model) {
        (Some(path), None) => Ok((read_fcidump(path)?, None)),
        (None, Some(path)) => {
            let model = read_model(path)?;
            let x = geometry_or_origin(cfg, model.dimension)?;
            let emb = VibronicEmbedding::new(model);
            let refs = emb.reference_determinants().to_vec();
            Ok((emb.integrals(&x)?, Some(refs)))
        }
        _ => Err(Error::arg("give exactly one of --fcidump and --model")),
    }
}

pub fn solve(cfg: RunConfig) -> Result<Outcome> {
    let (ints, refs) = load_system(&cfg)?;
    let mapping_name = cfg
        .mapping
        .clone()
        .unwrap_or_else(|| "parity-tapered".into());
    let solver_name = cfg.solver.clone().unwrap_or_else(|| "cqe".into());
    let n_states = cfg.states.unwrap_or(2);
    if n_states == 0 {
        return Err(Error::arg("--states must be at least 1"));
    }
    let sector = SymmetrySector::new(ints.n_electrons, ints.sz);
    let n = ints.n_spin_orbitals();
    let mapping = mapping_registry().create(
        &mapping_name,
        &MappingContext {
            n_spin_orbitals: n,
            sector,
        },
    )?;
    let solver = solver_registry().create(&solver_name, &solver_context(&cfg)?)?;
    let h = mapping.map(&build_hamiltonian(&ints))?;
    let guesses = match refs {
        Some(occ) if occ.len() >= n_states => Some(
            occ.iter()
                .take(n_states)
                .map(|o| prepare_determinant(o, n))
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => None,
    };
    let solution = solver.solve(&Problem {
        hamiltonian: &h,
        mapping: mapping.as_ref(),
        sector,
        n_states,
        guesses,
    })?;

    let out = cfg.out_dir();
    let energies = solution.energies();
    let e1 = energies.get(1).copied();
    let summary = json!({
        "solver": solver_name,
        "mapping": mapping_name,
        "n_qubits": mapping.n_qubits(),
        "E0": energies[0],
        "E1": e1,
        "gap": e1.map(|e| e - energies[0]),
        "energies": energies,
        "s_squared": solution.states.iter().map(|s| s.s_squared).collect::<Vec<_>>(),
        "converged": solution.states.iter().map(|s| s.converged).collect::<Vec<_>>(),
    });
    write(&out, "energies.json", &pretty(&summary))?;
    write(&out, "hamiltonian.txt", &h.to_string())?;
    for (k, s) in solution.states.iter().enumerate() {
        write(&out, &format!("state_{k}.txt"), &s.state.dump())?;
    }
    match &solution.trace {
        SolverTrace::None => {}
        SolverTrace::Cqe(runs) => {
            let mut csv = String::from(
                "state,iteration,energy,variance,epsilon,generator_norm,retained_terms\n",
            );
            for (k, run) in runs.iter().enumerate() {
                for r in run {
                    let _ = writeln!(
                        csv,
                        "{k},{},{:?},{:?},{:?},{:?},{}",
                        r.iteration,
                        r.energy,
                        r.variance,
                        r.epsilon,
                        r.generator_norm,
                        r.retained_terms
                    );
                }
            }
            write(&out, "cqe_trace.csv", &csv)?;
        }
        SolverTrace::Vqd(rows) => {
            let mut csv = String::from("evaluation,state,cost,energy,penalty\n");
            for r in rows {
                let _ = writeln!(
                    csv,
                    "{},{},{:?},{:?},{:?}",
                    r.evaluation, r.state, r.cost, r.energy, r.penalty
                );
            }
            write(&out, "vqd_trace.csv", &csv)?;
        }
    }
    Ok(if solution.converged() {
        Outcome::Converged
    } else {
        Outcome::NotConverged
    })
}

/// Integrals read from `point_I_J.fcidump` for the grid point nearest `x`.
struct GridFiles {
    dir: PathBuf,
    center: Vec<f64>,
    plane: BranchingPlane,
    half_widths: (f64, f64),
    grid: (usize, usize),
}

fn grid_index(coord: f64, half: f64, n: usize) -> Result<usize> {
    let t = (coord + half) / (2.0 * half) * (n - 1) as f64;
    let i = t.round();
    if !(i >= 0.0 && i <= (n - 1) as f64) || (t - i).abs() > 1e-6 {
        return Err(Error::arg(format!(
            "displacement {coord} is not on the scan grid"
        )));
    }
    Ok(i as usize)
}

impl IntegralProvider for GridFiles {
    fn dimension(&self) -> usize {
        self.center.len()
    }
    fn integrals(&self, x: &[f64]) -> Result<MolecularIntegrals> {
        let d: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        let dot = |v: &[f64]| d.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let i = grid_index(dot(&self.plane.g_orth), self.half_widths.0, self.grid.0)?;
        let j = grid_index(dot(&self.plane.h_orth), self.half_widths.1, self.grid.1)?;
        read_fcidump(self.dir.join(format!("point_{i}_{j}.fcidump")))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaneFile {
    center: Vec<f64>,
    g: Vec<f64>,
    h: Vec<f64>,
}

struct Setup {
    center: Vec<f64>,
    plane: BranchingPlane,
    context: BackendContext,
}

fn scan_setup(cfg: &RunConfig) -> Result<Setup> {
    let mapping = cfg
        .mapping
        .clone()
        .unwrap_or_else(|| "parity-tapered".into());
    let solver = solver_context(cfg)?;
    match (&cfg.model, &cfg.fcidump_dir) {
        (Some(path), None) => {
            let model = read_model(path)?;
            let center = geometry_or_origin(cfg, model.dimension)?;
            let plane = gh_vectors_model(&model, &center)?;
            let provider: Arc<dyn IntegralProvider> =
                Arc::new(VibronicEmbedding::new(model.clone()));
            Ok(Setup {
                center,
                plane,
                context: BackendContext {
                    model: Some(model),
                    provider: Some(provider),
                    mapping,
                    solver,
                },
            })
        }
        (None, Some(dir)) => {
            let path = dir.join("plane.json");
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let file: PlaneFile = serde_json::from_str(&text)?;
            let plane = BranchingPlane::new(file.g, file.h)?;
            if file.center.len() != plane.dimension() {
                return Err(Error::arg("plane.json center and g/h lengths differ"));
            }
            let provider: Arc<dyn IntegralProvider> = Arc::new(GridFiles {
                dir: dir.clone(),
                center: file.center.clone(),
                plane: plane.clone(),
                half_widths: cfg.half_widths()?,
                grid: cfg.grid()?,
            });
            Ok(Setup {
                center: file.center,
                plane,
                context: BackendContext {
                    model: None,
                    provider: Some(provider),
                    mapping,
                    solver,
                },
            })
        }
        _ => Err(Error::arg("give exactly one of --model and --fcidump-dir")),
    }
}

pub fn scan(cfg: RunConfig) -> Result<Outcome> {
    let setup = scan_setup(&cfg)?;
    let default_backend = if setup.context.model.is_some() {
        "model"
    } else {
        "exact"
    };
    let name = cfg.solver.clone().unwrap_or_else(|| default_backend.into());
    let backend = backend_registry().create(&name, &setup.context)?;
    let surface = scan_surface(
        backend.as_ref(),
        &setup.center,
        &setup.plane,
        cfg.half_widths()?,
        cfg.grid()?,
    )?;
    let out = cfg.out_dir();
    let mut header = surface.header_json();
    header["backend"] = json!(name);
    write(&out, "surface.csv", &surface.to_csv())?;
    write(&out, "surface.json", &pretty(&header))?;
    Ok(if surface.success_fraction() >= SCAN_SUCCESS_FRACTION {
        Outcome::Converged
    } else {
        Outcome::NotConverged
    })
}

pub fn meci(cfg: RunConfig) -> Result<Outcome> {
    let active = cfg.active.clone().unwrap_or_default();
    if active.is_empty() {
        return Err(Error::arg("no active coordinates to optimize"));
    }
    let path = cfg
        .model
        .as_ref()
        .ok_or_else(|| Error::arg("meci needs --model"))?;
    let model = read_model(path)?;
    let x0 = cfg
        .geometry
        .clone()
        .ok_or_else(|| Error::arg("meci needs a starting --geometry"))?;
    let provider: Arc<dyn IntegralProvider> = Arc::new(VibronicEmbedding::new(model.clone()));
    let context = BackendContext {
        model: Some(model),
        provider: Some(provider),
        mapping: cfg
            .mapping
            .clone()
            .unwrap_or_else(|| "parity-tapered".into()),
        solver: solver_context(&cfg)?,
    };
    let name = cfg.solver.clone().unwrap_or_else(|| "model".into());
    let backend = backend_registry().create(&name, &context)?;
    let exact: Box<dyn EnergyBackend> = backend_registry().create("exact", &context)?;
    let mut options = MeciOptions::new(active);
    options.freeze = cfg.freeze()?;
    if let Some(tol) = cfg.tol {
        options.tol_gap = tol;
    }
    if let Some(m) = cfg.max_iter {
        options.max_iter = m;
    }
    let result = meci_optimize(backend.as_ref(), exact.as_ref(), &x0, &options)?;
    let out = cfg.out_dir();
    write(&out, "meci_trace.csv", &result.trace.to_csv())?;
    let summary = json!({
        "backend": name,
        "x": result.x,
        "converged": result.converged,
        "line_search_failed": result.line_search_failed,
        "iterations": result.trace.rows.last().map(|r| r.iteration),
    });
    write(&out, "meci.json", &pretty(&summary))?;
    Ok(if result.converged {
        Outcome::Converged
    } else {
        Outcome::NotConverged
    })
}
