use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::backend::{EnergyBackend, StatePair};
use crate::error::{Error, Result};

const MAX_HALVINGS: usize = 10;
const SR1_SKIP: f64 = 1e-8;
const DEGENERATE_ROW: f64 = 1e-12;

/// Central differences of every output of `f` along each active coordinate,
/// as `(f(x + s e_i), f(x - s e_i))` pairs in `active` order.
fn displaced<T: Send>(
    f: &(dyn Fn(&[f64]) -> Result<T> + Sync),
    x: &[f64],
    active: &[usize],
    step: f64,
) -> Result<Vec<(T, T)>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::arg(format!(
            "finite-difference step {step} must be positive"
        )));
    }
    if let Some(&i) = active.iter().find(|&&i| i >= x.len()) {
        return Err(Error::arg(format!(
            "active coordinate {i} outside a {}-dimensional geometry",
            x.len()
        )));
    }
    active
        .par_iter()
        .map(|&i| {
            let at = |sign: f64| {
                let mut y = x.to_vec();
                y[i] += sign * step;
                f(&y)
            };
            Ok((at(1.0)?, at(-1.0)?))
        })
        .collect()
}

/// Central-difference gradient over `active`; other entries are zero.
pub fn fd_gradient(
    f: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
    x: &[f64],
    active: &[usize],
    step: f64,
) -> Result<Vec<f64>> {
    let checked = |y: &[f64]| -> Result<f64> {
        let v = f(y)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("{y:?}")))
        }
    };
    let pairs = displaced(&checked, x, active, step)?;
    let mut g = vec![0.0; x.len()];
    for (&i, (p, m)) in active.iter().zip(pairs) {
        g[i] = (p - m) / (2.0 * step);
    }
    Ok(g)
}

#[derive(Debug, Clone)]
pub struct MeciOptions {
    pub active: Vec<usize>,
    /// `(coordinate, value)` pairs held by linear constraints.
    pub freeze: Vec<(usize, f64)>,
    pub tol_gap: f64,
    pub tol_grad: f64,
    pub max_iter: usize,
    pub step: f64,
}

impl MeciOptions {
    pub fn new(active: Vec<usize>) -> Self {
        Self {
            active,
            freeze: Vec::new(),
            tol_gap: 0.0005,
            tol_grad: 0.01,
            max_iter: 25,
            step: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeciRow {
    pub iteration: usize,
    pub sim: StatePair,
    pub exact: StatePair,
    pub lagrangian_norm: f64,
}

#[derive(Debug, Clone, Default)]
pub struct MeciTrace {
    pub rows: Vec<MeciRow>,
}

impl MeciTrace {
    pub const HEADER: &'static str = "iteration,E0_sim,E1_sim,dE_sim,E0_exact,E1_exact,dE_exact";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::HEADER);
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:?},{:?},{:?},{:?},{:?},{:?}\n",
                r.iteration,
                r.sim.e0,
                r.sim.e1,
                r.sim.gap(),
                r.exact.e0,
                r.exact.e1,
                r.exact.gap()
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct MeciResult {
    pub x: Vec<f64>,
    pub converged: bool,
    /// Set when no step of the line search reduced the merit function.
    pub line_search_failed: bool,
    pub trace: MeciTrace,
}

fn finite_pair(backend: &dyn EnergyBackend, x: &[f64]) -> Result<StatePair> {
    let p = backend.energies(x)?;
    if p.e0.is_finite() && p.e1.is_finite() {
        Ok(p)
    } else {
        Err(Error::NonFinite(format!("{x:?}")))
    }
}

struct Local {
    pair: StatePair,
    grad_mean: DVector<f64>,
    rows: DMatrix<f64>,
    residuals: DVector<f64>,
}

impl Local {
    /// `gap^2` plus squared freeze violations.
    fn merit(&self) -> f64 {
        self.residuals[0]
            + self
                .residuals
                .rows(1, self.residuals.len() - 1)
                .norm_squared()
    }
}

/// Minimizes the state-averaged energy on the intersection seam: constraint
/// `gap^2 = 0` plus linear freezes, solved by SQP steps on the KKT system with
/// a symmetric-rank-one Hessian of the Lagrangian.
pub fn meci_optimize(
    backend: &dyn EnergyBackend,
    exact: &dyn EnergyBackend,
    x0: &[f64],
    options: &MeciOptions,
) -> Result<MeciResult> {
    let active = &options.active;
    if active.is_empty() {
        return Err(Error::arg("no active coordinates to optimize"));
    }
    if x0.len() != backend.dimension() {
        return Err(Error::arg(format!(
            "start has {} coordinates, backend {}",
            x0.len(),
            backend.dimension()
        )));
    }
    let mut seen = vec![false; x0.len()];
    for &i in active {
        if i >= x0.len() || std::mem::replace(&mut seen[i], true) {
            return Err(Error::arg(format!(
                "invalid or repeated active coordinate {i}"
            )));
        }
    }
    let frozen: Vec<(usize, f64)> = options
        .freeze
        .iter()
        .map(|&(i, v)| match active.iter().position(|&a| a == i) {
            Some(pos) if v.is_finite() => Ok((pos, v)),
            _ => Err(Error::arg(format!(
                "freeze on coordinate {i} must target an active coordinate"
            ))),
        })
        .collect::<Result<_>>()?;
    let m = active.len();

    let local = |x: &[f64], pair: StatePair| -> Result<Local> {
        let pairs = displaced(
            &|y: &[f64]| finite_pair(backend, y),
            x,
            active,
            options.step,
        )?;
        let h2 = 2.0 * options.step;
        let grad_mean =
            DVector::from_iterator(m, pairs.iter().map(|(p, q)| (p.mean() - q.mean()) / h2));
        let grad_q = DVector::from_iterator(
            m,
            pairs
                .iter()
                .map(|(p, q)| (p.gap().powi(2) - q.gap().powi(2)) / h2),
        );
        let mut rows = DMatrix::zeros(1 + frozen.len(), m);
        rows.set_row(0, &grad_q.transpose());
        let mut residuals = DVector::zeros(1 + frozen.len());
        residuals[0] = pair.gap().powi(2);
        for (k, &(pos, v)) in frozen.iter().enumerate() {
            rows[(k + 1, pos)] = 1.0;
            residuals[k + 1] = x[active[pos]] - v;
        }
        Ok(Local {
            pair,
            grad_mean,
            rows,
            residuals,
        })
    };

    let mut x = x0.to_vec();
    let mut here = local(&x, finite_pair(backend, &x)?)?;
    let mut hess = DMatrix::<f64>::identity(m, m);
    let mut lambda = DVector::<f64>::zeros(1 + frozen.len());
    let mut trace = MeciTrace::default();
    let mut converged = false;
    let mut line_search_failed = false;
    let mut previous: Option<(DVector<f64>, Local)> = None;

    for iteration in 0..=options.max_iter {
        if let Some((s, old)) = previous.take() {
            let y =
                (&here.grad_mean - &old.grad_mean) + (&here.rows - &old.rows).transpose() * &lambda;
            let r = &y - &hess * &s;
            let denom = r.dot(&s);
            if denom.abs() > SR1_SKIP * r.norm() * s.norm() {
                hess += &r * r.transpose() / denom;
            }
            if hess.iter().any(|v| !v.is_finite()) {
                hess = DMatrix::identity(m, m);
            }
        }
        let keep: Vec<usize> = (0..here.rows.nrows())
            .filter(|&k| k > 0 || here.rows.row(0).norm() > DEGENERATE_ROW)
            .collect();
        let a = here.rows.select_rows(&keep);
        let c = here.residuals.select_rows(&keep);
        let lambda_ls = a
            .transpose()
            .svd(true, true)
            .solve(&(-&here.grad_mean), 1e-12)
            .map_err(|e| Error::Contract(e.to_string()))?;
        let stationarity = &here.grad_mean + a.transpose() * &lambda_ls;
        let lagrangian_norm = (stationarity.norm_squared() + here.merit()).sqrt();
        let row = MeciRow {
            iteration,
            sim: here.pair,
            exact: finite_pair(exact, &x)?,
            lagrangian_norm,
        };
        trace.rows.push(row);
        if here.pair.gap() < options.tol_gap && lagrangian_norm < options.tol_grad {
            converged = true;
            break;
        }
        if iteration == options.max_iter {
            break;
        }

        let nc = keep.len();
        let mut kkt = DMatrix::zeros(m + nc, m + nc);
        kkt.view_mut((0, 0), (m, m)).copy_from(&hess);
        kkt.view_mut((0, m), (m, nc)).copy_from(&a.transpose());
        kkt.view_mut((m, 0), (nc, m)).copy_from(&a);
        let mut rhs = DVector::zeros(m + nc);
        rhs.rows_mut(0, m).copy_from(&(-&here.grad_mean));
        rhs.rows_mut(m, nc).copy_from(&(-&c));
        let sol = kkt
            .clone()
            .lu()
            .solve(&rhs)
            .or_else(|| kkt.svd(true, true).solve(&rhs, 1e-14).ok())
            .ok_or_else(|| Error::Contract("singular KKT system".into()))?;
        let p = sol.rows(0, m).into_owned();
        lambda.fill(0.0);
        for (j, &k) in keep.iter().enumerate() {
            lambda[k] = sol[m + j];
        }

        let merit = here.merit();
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let mut trial = x.clone();
            for (j, &i) in active.iter().enumerate() {
                trial[i] += t * p[j];
            }
            let pair = finite_pair(backend, &trial)?;
            let frozen_sq: f64 = frozen
                .iter()
                .map(|&(pos, v)| (trial[active[pos]] - v).powi(2))
                .sum();
            if pair.gap().powi(2) + frozen_sq < merit {
                accepted = Some((trial, pair));
                break;
            }
            t *= 0.5;
        }
        let Some((trial, pair)) = accepted else {
            line_search_failed = true;
            break;
        };
        let s = DVector::from_iterator(m, active.iter().map(|&i| trial[i] - x[i]));
        let next = local(&trial, pair)?;
        previous = Some((s, std::mem::replace(&mut here, next)));
        x = trial;
    }
    Ok(MeciResult {
        x,
        converged,
        line_search_failed,
        trace,
    })
}
