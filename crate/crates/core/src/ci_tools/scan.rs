use rayon::prelude::*;

use super::backend::{EnergyBackend, StatePair};
use super::plane::BranchingPlane;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceRow {
    pub u: f64,
    pub v: f64,
    /// Energies, or the backend's error message.
    pub result: std::result::Result<StatePair, String>,
}

#[derive(Debug, Clone)]
pub struct Surface {
    pub center: Vec<f64>,
    pub plane: BranchingPlane,
    pub half_widths: (f64, f64),
    pub grid: (usize, usize),
    /// `u` outer, `v` inner, both ascending.
    pub rows: Vec<SurfaceRow>,
}

fn axis(half: f64, n: usize, i: usize) -> f64 {
    -half + 2.0 * half * i as f64 / (n - 1) as f64
}

impl Surface {
    pub fn success_fraction(&self) -> f64 {
        let ok = self.rows.iter().filter(|r| r.result.is_ok()).count();
        ok as f64 / self.rows.len() as f64
    }

    pub fn min_gap(&self) -> Option<(f64, f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.result.as_ref().ok().map(|p| (r.u, r.v, p.gap())))
            .min_by(|a, b| a.2.total_cmp(&b.2))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,v,E0,E1,status\n");
        for r in &self.rows {
            match &r.result {
                Ok(p) => out.push_str(&format!("{:?},{:?},{:?},{:?},ok\n", r.u, r.v, p.e0, p.e1)),
                Err(msg) => {
                    let clean: String = msg
                        .chars()
                        .map(|c| if c == ',' || c == '\n' { ';' } else { c })
                        .collect();
                    out.push_str(&format!("{:?},{:?},NaN,NaN,error: {clean}\n", r.u, r.v));
                }
            }
        }
        out
    }

    pub fn header_json(&self) -> serde_json::Value {
        serde_json::json!({
            "center": self.center,
            "g": self.plane.g,
            "h": self.plane.h,
            "g_orth": self.plane.g_orth,
            "h_orth": self.plane.h_orth,
            "half_widths": [self.half_widths.0, self.half_widths.1],
            "grid": [self.grid.0, self.grid.1],
        })
    }
}

/// `(E0, E1)` on the grid `center + u g_orth + v h_orth`, `|u| <= a`,
/// `|v| <= b`. Failed points are recorded and the scan continues.
pub fn scan_surface(
    backend: &dyn EnergyBackend,
    center: &[f64],
    plane: &BranchingPlane,
    half_widths: (f64, f64),
    grid: (usize, usize),
) -> Result<Surface> {
    let (na, nb) = grid;
    if na < 2 || nb < 2 {
        return Err(Error::arg(format!(
            "grid {na}x{nb} needs at least 2 points per axis"
        )));
    }
    let (a, b) = half_widths;
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::arg(format!(
            "half widths ({a}, {b}) must be positive"
        )));
    }
    if center.len() != plane.dimension() || center.len() != backend.dimension() {
        return Err(Error::arg(format!(
            "center has {} coordinates, plane {}, backend {}",
            center.len(),
            plane.dimension(),
            backend.dimension()
        )));
    }
    let rows = (0..na * nb)
        .into_par_iter()
        .map(|k| {
            let (u, v) = (axis(a, na, k / nb), axis(b, nb, k % nb));
            let x = plane.point(center, u, v);
            let result = backend
                .energies(&x)
                .and_then(|p| {
                    if p.e0.is_finite() && p.e1.is_finite() {
                        Ok(p)
                    } else {
                        Err(Error::NonFinite(format!("u={u}, v={v}")))
                    }
                })
                .map_err(|e| e.to_string());
            SurfaceRow { u, v, result }
        })
        .collect();
    Ok(Surface {
        center: center.to_vec(),
        plane: plane.clone(),
        half_widths,
        grid,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::super::backend::ModelBackend;
    use super::super::plane::gh_vectors_model;
    use super::*;
    use crate::integrals::VibronicModel;

    fn model() -> VibronicModel {
        VibronicModel::read(concat!(env!("CARGO_MANIFEST_DIR"), "/assets/vibronic.json")).unwrap()
    }

    struct Flaky;
    impl EnergyBackend for Flaky {
        fn name(&self) -> &'static str {
            "flaky"
        }
        fn dimension(&self) -> usize {
            2
        }
        fn energies(&self, x: &[f64]) -> Result<StatePair> {
            if x[0] > 0.5 {
                Err(Error::arg("too far, really"))
            } else {
                Ok(StatePair {
                    e0: 0.0,
                    e1: x[0].abs(),
                })
            }
        }
    }

    #[test]
    fn model_cone() {
        let m = model();
        let plane = gh_vectors_model(&m, &[0.0; 4]).unwrap();
        let s = scan_surface(
            &ModelBackend { model: m.clone() },
            &[0.0; 4],
            &plane,
            (0.1, 0.1),
            (11, 11),
        )
        .unwrap();
        assert_eq!(s.rows.len(), 121);
        let (u, v, gap) = s.min_gap().unwrap();
        assert!(u.abs() < 1e-15 && v.abs() < 1e-15 && gap.abs() < 1e-15);
        for r in s.rows.iter().filter(|r| r.v.abs() < 1e-15) {
            let gap = r.result.as_ref().unwrap().gap();
            assert!((gap - 2.0 * m.g_strength * r.u.abs()).abs() < 1e-14);
        }
        assert_eq!(s.to_csv().lines().count(), 122);
    }

    #[test]
    fn failures_are_rows() {
        let plane = BranchingPlane::new(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let s = scan_surface(&Flaky, &[0.0, 0.0], &plane, (1.0, 1.0), (3, 2)).unwrap();
        assert_eq!(s.rows.len(), 6);
        assert!((s.success_fraction() - 4.0 / 6.0).abs() < 1e-12);
        let csv = s.to_csv();
        assert!(csv.contains("error: invalid argument: too far; really"));
        assert!(scan_surface(&Flaky, &[0.0, 0.0], &plane, (1.0, 1.0), (1, 2)).is_err());
        assert!(scan_surface(&Flaky, &[0.0], &plane, (1.0, 1.0), (2, 2)).is_err());
    }
}
