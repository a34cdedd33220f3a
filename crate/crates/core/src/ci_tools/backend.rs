use crate::error::{Error, Result};
use crate::exact::diagonalize_mapped_sector;
use crate::integrals::{
    build_hamiltonian, model_adiabatic, MolecularIntegrals, VibronicEmbedding, VibronicModel,
};
use crate::qubit_map::{mapping_registry, MappingContext, SymmetrySector};
use crate::registry::Registry;
use crate::simulator::prepare_determinant;
use crate::solver::{solver_registry, Eigensolver, Problem, SolverContext};

const SINGLET_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePair {
    pub e0: f64,
    pub e1: f64,
}

impl StatePair {
    pub fn gap(&self) -> f64 {
        self.e1 - self.e0
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.e0 + self.e1)
    }
}

/// Lowest two states at a geometry. Implementations are pure per geometry.
pub trait EnergyBackend: Send + Sync {
    fn name(&self) -> &'static str;
    fn dimension(&self) -> usize;
    fn energies(&self, x: &[f64]) -> Result<StatePair>;
}

/// Molecular integrals as a function of geometry.
pub trait IntegralProvider: Send + Sync {
    fn dimension(&self) -> usize;
    fn integrals(&self, x: &[f64]) -> Result<MolecularIntegrals>;
    /// Occupations of the preferred starting determinants, if any.
    fn reference_determinants(&self) -> Option<Vec<Vec<usize>>> {
        None
    }
}

impl IntegralProvider for VibronicEmbedding {
    fn dimension(&self) -> usize {
        self.model.dimension
    }
    fn integrals(&self, x: &[f64]) -> Result<MolecularIntegrals> {
        VibronicEmbedding::integrals(self, x)
    }
    fn reference_determinants(&self) -> Option<Vec<Vec<usize>>> {
        Some(VibronicEmbedding::reference_determinants(self).to_vec())
    }
}

impl IntegralProvider for std::sync::Arc<dyn IntegralProvider> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn integrals(&self, x: &[f64]) -> Result<MolecularIntegrals> {
        (**self).integrals(x)
    }
    fn reference_determinants(&self) -> Option<Vec<Vec<usize>>> {
        (**self).reference_determinants()
    }
}

pub struct ModelBackend {
    pub model: VibronicModel,
}

impl EnergyBackend for ModelBackend {
    fn name(&self) -> &'static str {
        "model"
    }
    fn dimension(&self) -> usize {
        self.model.dimension
    }
    fn energies(&self, x: &[f64]) -> Result<StatePair> {
        let a = model_adiabatic(&self.model, x)?;
        Ok(StatePair { e0: a.e0, e1: a.e1 })
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn sector_of(ints: &MolecularIntegrals) -> SymmetrySector {
    SymmetrySector::new(ints.n_electrons, ints.sz)
}

/// Two lowest singlets from dense diagonalization of the mapped Hamiltonian.
pub struct ExactBackend<P> {
    pub provider: P,
    pub mapping: String,
}

impl<P: IntegralProvider> EnergyBackend for ExactBackend<P> {
    fn name(&self) -> &'static str {
        "exact"
    }
    fn dimension(&self) -> usize {
        self.provider.dimension()
    }
    fn energies(&self, x: &[f64]) -> Result<StatePair> {
        let ints = self.provider.integrals(x)?;
        let sector = sector_of(&ints);
        let ctx = MappingContext {
            n_spin_orbitals: ints.n_spin_orbitals(),
            sector,
        };
        let mapping = mapping_registry().create(&self.mapping, &ctx)?;
        let h = mapping.map(&build_hamiltonian(&ints))?;
        let n_orb = ints.n_orbitals;
        let dim = binomial(n_orb, sector.n_alpha()) * binomial(n_orb, sector.n_beta());
        let spectrum = diagonalize_mapped_sector(&h, mapping.as_ref(), sector, dim.min(16))?;
        let labels = spectrum.sector_labels.unwrap_or_default();
        let singlets: Vec<f64> = spectrum
            .energies
            .iter()
            .zip(&labels)
            .filter(|(_, l)| l.s_squared.abs() < SINGLET_TOL)
            .map(|(e, _)| *e)
            .collect();
        match singlets.as_slice() {
            [e0, e1, ..] => Ok(StatePair { e0: *e0, e1: *e1 }),
            _ => Err(Error::Contract(
                "fewer than two singlets among the lowest states".into(),
            )),
        }
    }
}

/// Two lowest states from an iterative solver run at each geometry.
pub struct SolverBackend<P> {
    pub provider: P,
    pub mapping: String,
    pub solver: Box<dyn Eigensolver>,
}

impl<P: IntegralProvider> EnergyBackend for SolverBackend<P> {
    fn name(&self) -> &'static str {
        self.solver.name()
    }
    fn dimension(&self) -> usize {
        self.provider.dimension()
    }
    fn energies(&self, x: &[f64]) -> Result<StatePair> {
        let ints = self.provider.integrals(x)?;
        let sector = sector_of(&ints);
        let n = ints.n_spin_orbitals();
        let ctx = MappingContext {
            n_spin_orbitals: n,
            sector,
        };
        let mapping = mapping_registry().create(&self.mapping, &ctx)?;
        let h = mapping.map(&build_hamiltonian(&ints))?;
        let guesses = match self.provider.reference_determinants() {
            Some(occ) => Some(
                occ.iter()
                    .map(|o| prepare_determinant(o, n))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        let solution = self.solver.solve(&Problem {
            hamiltonian: &h,
            mapping: mapping.as_ref(),
            sector,
            n_states: 2,
            guesses,
        })?;
        if !solution.converged() {
            return Err(Error::Contract(format!(
                "{} did not converge at this geometry",
                self.solver.name()
            )));
        }
        let mut e = solution.energies();
        e.sort_by(f64::total_cmp);
        Ok(StatePair { e0: e[0], e1: e[1] })
    }
}

/// What a backend may be built from.
pub struct BackendContext {
    pub model: Option<VibronicModel>,
    pub provider: Option<std::sync::Arc<dyn IntegralProvider>>,
    pub mapping: String,
    pub solver: SolverContext,
}

impl BackendContext {
    fn provider(&self, backend: &str) -> Result<std::sync::Arc<dyn IntegralProvider>> {
        self.provider
            .clone()
            .ok_or_else(|| Error::arg(format!("backend '{backend}' needs an integral source")))
    }
}

fn make_model(ctx: &BackendContext) -> Result<Box<dyn EnergyBackend>> {
    let model = ctx
        .model
        .clone()
        .ok_or_else(|| Error::arg("backend 'model' needs a vibronic model"))?;
    Ok(Box::new(ModelBackend { model }))
}

fn make_exact(ctx: &BackendContext) -> Result<Box<dyn EnergyBackend>> {
    Ok(Box::new(ExactBackend {
        provider: ctx.provider("exact")?,
        mapping: ctx.mapping.clone(),
    }))
}

fn make_solver_backed(name: &str, ctx: &BackendContext) -> Result<Box<dyn EnergyBackend>> {
    Ok(Box::new(SolverBackend {
        provider: ctx.provider(name)?,
        mapping: ctx.mapping.clone(),
        solver: solver_registry().create(name, &ctx.solver)?,
    }))
}

fn make_cqe(ctx: &BackendContext) -> Result<Box<dyn EnergyBackend>> {
    make_solver_backed("cqe", ctx)
}

fn make_vqd(ctx: &BackendContext) -> Result<Box<dyn EnergyBackend>> {
    make_solver_backed("vqd", ctx)
}

pub fn backend_registry() -> Registry<dyn EnergyBackend, BackendContext> {
    Registry::new("backend")
        .with("model", make_model)
        .with("exact", make_exact)
        .with("cqe", make_cqe)
        .with("vqd", make_vqd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solver_registry, SolverContext};

    fn model() -> VibronicModel {
        VibronicModel::read(concat!(env!("CARGO_MANIFEST_DIR"), "/assets/vibronic.json")).unwrap()
    }

    #[test]
    fn registry_needs_sources() {
        let ctx = BackendContext {
            model: None,
            provider: None,
            mapping: "jw".into(),
            solver: SolverContext::default(),
        };
        for name in ["model", "exact", "cqe", "vqd", "dmrg"] {
            assert!(backend_registry().create(name, &ctx).is_err(), "{name}");
        }
    }

    #[test]
    fn three_backends_agree_on_embedding() {
        let x = [0.3, -0.2, 0.1, 0.05];
        let m = ModelBackend { model: model() }.energies(&x).unwrap();
        for mapping in ["jw", "parity-tapered"] {
            let ex = ExactBackend {
                provider: VibronicEmbedding::new(model()),
                mapping: mapping.into(),
            }
            .energies(&x)
            .unwrap();
            assert!(
                (ex.e0 - m.e0).abs() < 1e-12 && (ex.e1 - m.e1).abs() < 1e-12,
                "{mapping}"
            );
            let cqe = SolverBackend {
                provider: VibronicEmbedding::new(model()),
                mapping: mapping.into(),
                solver: solver_registry()
                    .create("cqe", &SolverContext::default())
                    .unwrap(),
            }
            .energies(&x)
            .unwrap();
            assert!(
                (cqe.e0 - m.e0).abs() < 1e-6 && (cqe.e1 - m.e1).abs() < 1e-6,
                "{mapping}"
            );
        }
    }
}
