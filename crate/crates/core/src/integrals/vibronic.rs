use serde::{Deserialize, Serialize};

use super::hamiltonian::MolecularIntegrals;
use crate::error::{Error, Result};

/// Two diabatic states with linear tuning (`g`) and coupling (`h`) modes on
/// coordinates 0 and 1, sharing a quadratic seam potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VibronicModel {
    pub dimension: usize,
    #[serde(rename = "g")]
    pub g_strength: f64,
    #[serde(rename = "h")]
    pub h_strength: f64,
    pub seam_gradient: Vec<f64>,
    pub seam_hessian: Vec<Vec<f64>>,
    #[serde(rename = "offset")]
    pub energy_offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adiabatic {
    pub e0: f64,
    pub e1: f64,
    pub diabatic: [[f64; 2]; 2],
}

impl Adiabatic {
    pub fn gap(&self) -> f64 {
        self.e1 - self.e0
    }
}

impl VibronicModel {
    pub fn validate(&self) -> Result<()> {
        let d = self.dimension;
        if d < 2 {
            return Err(Error::arg("vibronic model needs at least 2 coordinates"));
        }
        if self.seam_gradient.len() != d
            || self.seam_hessian.len() != d
            || self.seam_hessian.iter().any(|r| r.len() != d)
        {
            return Err(Error::arg(format!(
                "seam_gradient/seam_hessian must have dimension {d}"
            )));
        }
        for i in 0..d {
            for j in 0..d {
                if (self.seam_hessian[i][j] - self.seam_hessian[j][i]).abs() > 1e-12 {
                    return Err(Error::arg("seam_hessian must be symmetric"));
                }
            }
        }
        let values = [self.g_strength, self.h_strength, self.energy_offset];
        if values
            .iter()
            .chain(&self.seam_gradient)
            .chain(self.seam_hessian.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(Error::arg("vibronic model parameters must be finite"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: VibronicModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text =
            std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        Self::from_json(&text)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::arg(format!(
                "geometry has {} coordinates, model has {}",
                x.len(),
                self.dimension
            )));
        }
        Ok(())
    }

    /// Shared seam potential `offset + s.x + x.H.x / 2`.
    pub fn seam_potential(&self, x: &[f64]) -> f64 {
        let mut v = self.energy_offset;
        for i in 0..self.dimension {
            v += self.seam_gradient[i] * x[i];
            for j in 0..self.dimension {
                v += 0.5 * x[i] * self.seam_hessian[i][j] * x[j];
            }
        }
        v
    }

    pub fn diabatic(&self, x: &[f64]) -> Result<[[f64; 2]; 2]> {
        self.check_dim(x)?;
        let sigma = self.seam_potential(x);
        let tune = self.g_strength * x[0];
        let coupling = self.h_strength * x[1];
        Ok([[sigma + tune, coupling], [coupling, sigma - tune]])
    }

    /// `(g, h)` with `g = grad (H11 - H22) / 2` and `h = grad H12`.
    pub fn gh_vectors(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_dim(x)?;
        let mut g = vec![0.0; self.dimension];
        let mut h = vec![0.0; self.dimension];
        g[0] = self.g_strength;
        h[1] = self.h_strength;
        Ok((g, h))
    }
}

pub fn model_adiabatic(model: &VibronicModel, x: &[f64]) -> Result<Adiabatic> {
    let diabatic = model.diabatic(x)?;
    let sigma = model.seam_potential(x);
    let half_gap = (model.g_strength * x[0]).hypot(model.h_strength * x[1]);
    Ok(Adiabatic {
        e0: sigma - half_gap,
        e1: sigma + half_gap,
        diabatic,
    })
}

/// Realizes the vibronic model as a two-orbital, two-electron molecular
/// Hamiltonian whose two lowest singlets are the model's adiabatic states.
///
/// The closed-shell determinants `|1a 1b>` and `|2a 2b>` carry the diabatic
/// energies and are coupled through the exchange integral `(12|12)`. The
/// open-shell configurations sit `open_shell_shift` above the seam.
#[derive(Debug, Clone, PartialEq)]
pub struct VibronicEmbedding {
    pub model: VibronicModel,
    pub on_site: f64,
    pub open_shell_shift: f64,
}

impl VibronicEmbedding {
    pub fn new(model: VibronicModel) -> Self {
        Self {
            model,
            on_site: 0.5,
            open_shell_shift: 1.0,
        }
    }

    pub fn integrals(&self, x: &[f64]) -> Result<MolecularIntegrals> {
        self.model.check_dim(x)?;
        let u = self.on_site;
        let tune = self.model.g_strength * x[0];
        let coupling = self.model.h_strength * x[1];
        let h_one = vec![(tune - u) / 2.0, 0.0, 0.0, (-tune - u) / 2.0];
        let mut chem = vec![0.0; 16];
        let at = |p: usize, q: usize, r: usize, s: usize| ((p * 2 + q) * 2 + r) * 2 + s;
        chem[at(0, 0, 0, 0)] = u;
        chem[at(1, 1, 1, 1)] = u;
        chem[at(0, 0, 1, 1)] = u + self.open_shell_shift;
        chem[at(1, 1, 0, 0)] = u + self.open_shell_shift;
        for (p, q, r, s) in [(0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0), (1, 0, 1, 0)] {
            chem[at(p, q, r, s)] = coupling;
        }
        MolecularIntegrals::from_chemist(2, 2, 0.0, self.model.seam_potential(x), h_one, &chem)
    }

    /// Spin-orbital occupations of the two closed-shell reference determinants.
    pub fn reference_determinants(&self) -> [Vec<usize>; 2] {
        [vec![0, 1], vec![2, 3]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn model() -> VibronicModel {
        VibronicModel {
            dimension: 4,
            g_strength: 0.05,
            h_strength: 0.04,
            seam_gradient: vec![0.0, 0.0, 0.03, -0.02],
            seam_hessian: vec![
                vec![0.2, 0.0, 0.0, 0.0],
                vec![0.0, 0.25, 0.0, 0.0],
                vec![0.0, 0.0, 0.5, 0.1],
                vec![0.0, 0.0, 0.1, 0.4],
            ],
            energy_offset: 0.15,
        }
    }

    #[test]
    fn degenerate_at_origin() {
        let a = model_adiabatic(&model(), &[0.0; 4]).unwrap();
        assert_eq!(a.e0, 0.15);
        assert_eq!(a.e1, 0.15);
        assert_eq!(a.diabatic[0][0], a.diabatic[1][1]);
        assert_eq!(a.diabatic[0][1], 0.0);
    }

    #[test]
    fn gap_linear_along_tuning_mode() {
        let m = model();
        for t in [0.01, -0.03, 0.2] {
            let a = model_adiabatic(&m, &[t, 0.0, 0.0, 0.0]).unwrap();
            assert!((a.gap() - 2.0 * m.g_strength * t.abs()).abs() < 1e-15);
        }
    }

    #[test]
    fn dimension_mismatch() {
        assert!(model_adiabatic(&model(), &[0.0; 3]).is_err());
    }

    #[test]
    fn json_keys() {
        let text = r#"{"dimension":2,"g":0.1,"h":0.2,"seam_gradient":[0,0],
            "seam_hessian":[[1,0],[0,1]],"offset":0.0}"#;
        let m = VibronicModel::from_json(text).unwrap();
        assert_eq!(m.h_strength, 0.2);
        let bad = text.replace("\"offset\"", "\"offsett\"");
        assert!(VibronicModel::from_json(&bad).is_err());
    }

    #[test]
    fn embedding_is_valid() {
        let emb = VibronicEmbedding::new(model());
        let ints = emb.integrals(&[0.1, -0.2, 0.3, 0.0]).unwrap();
        assert_eq!(ints.n_orbitals, 2);
        assert!((ints.chem(0, 1, 0, 1) - 0.04 * -0.2).abs() < 1e-15);
    }
}
