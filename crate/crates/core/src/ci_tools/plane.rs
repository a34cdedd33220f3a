use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::VibronicModel;

const COLLINEAR_TOL: f64 = 1e-10;

/// `g`, `h` and their Gram-Schmidt orthonormalized pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchingPlane {
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub g_orth: Vec<f64>,
    pub h_orth: Vec<f64>,
}

impl BranchingPlane {
    pub fn new(g: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        let (g_orth, h_orth) = orthogonalize_gh(&g, &h)?;
        Ok(Self {
            g,
            h,
            g_orth,
            h_orth,
        })
    }

    pub fn dimension(&self) -> usize {
        self.g.len()
    }

    /// `center + u g_orth + v h_orth`.
    pub fn point(&self, center: &[f64], u: f64, v: f64) -> Vec<f64> {
        center
            .iter()
            .zip(self.g_orth.iter().zip(&self.h_orth))
            .map(|(c, (g, h))| c + u * g + v * h)
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn orthogonalize_gh(g: &[f64], h: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if g.len() != h.len() || g.is_empty() {
        return Err(Error::arg(format!(
            "g and h have lengths {} and {}",
            g.len(),
            h.len()
        )));
    }
    if g.iter().chain(h).any(|v| !v.is_finite()) {
        return Err(Error::arg("g and h must be finite"));
    }
    let gn = dot(g, g).sqrt();
    if gn < COLLINEAR_TOL {
        return Err(Error::Collinear("g vanishes".into()));
    }
    let g_orth: Vec<f64> = g.iter().map(|x| x / gn).collect();
    let proj = dot(h, &g_orth);
    let perp: Vec<f64> = h.iter().zip(&g_orth).map(|(x, e)| x - proj * e).collect();
    let pn = dot(&perp, &perp).sqrt();
    if pn < COLLINEAR_TOL {
        return Err(Error::Collinear(format!(
            "h has only {pn:.3e} outside the span of g"
        )));
    }
    Ok((g_orth, perp.iter().map(|x| x / pn).collect()))
}

pub fn gh_vectors_model(model: &VibronicModel, x: &[f64]) -> Result<BranchingPlane> {
    let (g, h) = model.gh_vectors(x)?;
    BranchingPlane::new(g, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> VibronicModel {
        VibronicModel::from_json(
            r#"{"dimension": 3, "g": 0.05, "h": 0.04, "offset": 0.0,
                "seam_gradient": [0, 0, 0], "seam_hessian": [[1,0,0],[0,1,0],[0,0,1]]}"#,
        )
        .unwrap()
    }

    #[test]
    fn model_plane() {
        let p = gh_vectors_model(&model(), &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(p.g, vec![0.05, 0.0, 0.0]);
        assert_eq!(p.h, vec![0.0, 0.04, 0.0]);
        assert_eq!(p.g_orth, vec![1.0, 0.0, 0.0]);
        assert_eq!(p.h_orth, vec![0.0, 1.0, 0.0]);
        let mut m = model();
        m.h_strength *= 2.0;
        let q = gh_vectors_model(&m, &[0.0; 3]).unwrap();
        assert_eq!(q.h_orth, p.h_orth);
        assert!((q.h[1] - 2.0 * p.h[1]).abs() < 1e-15);
    }

    #[test]
    fn perpendicular_part_kept() {
        let (g, h) = orthogonalize_gh(&[2.0, 0.0], &[2.0, 1e-3]).unwrap();
        assert_eq!(g, vec![1.0, 0.0]);
        assert!((h[1] - 1.0).abs() < 1e-12 && h[0].abs() < 1e-12);
    }

    #[test]
    fn collinear_rejected() {
        assert!(matches!(
            orthogonalize_gh(&[1.0, 1.0], &[2.0, 2.0]),
            Err(Error::Collinear(_))
        ));
        assert!(orthogonalize_gh(&[0.0, 0.0], &[1.0, 0.0]).is_err());
        assert!(orthogonalize_gh(&[1.0], &[1.0, 0.0]).is_err());
    }
}
