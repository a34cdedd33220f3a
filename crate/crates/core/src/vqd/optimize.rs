use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::registry::Registry;

pub type Objective<'a> = dyn FnMut(&[f64]) -> f64 + 'a;

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Derivative-free minimiser with an evaluation budget.
pub trait Optimizer: Send + Sync {
    fn name(&self) -> &'static str;
    fn minimize(&self, f: &mut Objective<'_>, x0: &[f64], budget: usize) -> Result<Minimum>;
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizerContext {
    /// Stop once the objective changes by less than this over a cycle.
    pub tol: f64,
}

impl Default for OptimizerContext {
    fn default() -> Self {
        Self { tol: 1e-6 }
    }
}

/// Powell's COBYLA, linear models on a simplex inside a trust region.
#[derive(Debug, Clone)]
pub struct Cobyla {
    pub tol: f64,
    pub initial_step: f64,
}

impl Optimizer for Cobyla {
    fn name(&self) -> &'static str {
        "cobyla"
    }

    fn minimize(&self, f: &mut Objective<'_>, x0: &[f64], budget: usize) -> Result<Minimum> {
        check(x0, budget)?;
        let best = RefCell::new((f64::INFINITY, x0.to_vec(), 0usize));
        let g = RefCell::new(f);
        let obj = |x: &[f64], _: &mut ()| {
            let v = (g.borrow_mut())(x);
            let mut b = best.borrow_mut();
            b.2 += 1;
            if v < b.0 {
                b.0 = v;
                b.1 = x.to_vec();
            }
            v
        };
        let bounds = vec![(-4.0 * std::f64::consts::PI, 4.0 * std::f64::consts::PI); x0.len()];
        let cons: Vec<&dyn cobyla::Func<()>> = Vec::new();
        let stop = cobyla::StopTols {
            ftol_abs: self.tol,
            ..Default::default()
        };
        let outcome = cobyla::minimize(
            obj,
            x0,
            &bounds,
            &cons,
            (),
            budget,
            cobyla::RhoBeg::All(self.initial_step),
            Some(stop),
        );
        let converged = matches!(
            outcome,
            Ok((
                cobyla::SuccessStatus::FtolReached
                    | cobyla::SuccessStatus::XtolReached
                    | cobyla::SuccessStatus::Success,
                _,
                _
            ))
        );
        let (value, x, evaluations) = best.into_inner();
        Ok(Minimum {
            x,
            value,
            evaluations,
            converged,
        })
    }
}

/// Coordinate descent exploiting `f(x_k) = a + b cos(x_k - phi)` for
/// rotation-angle parameters; two evaluations per coordinate.
#[derive(Debug, Clone)]
pub struct Rotosolve {
    pub tol: f64,
}

impl Optimizer for Rotosolve {
    fn name(&self) -> &'static str {
        "rotosolve"
    }

    fn minimize(&self, f: &mut Objective<'_>, x0: &[f64], budget: usize) -> Result<Minimum> {
        check(x0, budget)?;
        let half = std::f64::consts::FRAC_PI_2;
        let mut x = x0.to_vec();
        let mut value = f(&x);
        let mut evals = 1;
        let mut converged = false;
        'sweeps: loop {
            let start = value;
            for k in 0..x.len() {
                if evals + 2 > budget {
                    break 'sweeps;
                }
                let xk = x[k];
                x[k] = xk + half;
                let fp = f(&x);
                x[k] = xk - half;
                let fm = f(&x);
                evals += 2;
                let a = 0.5 * (fp + fm);
                let (p, q) = (value - a, 0.5 * (fp - fm));
                let predicted = a - p.hypot(q);
                if predicted < value {
                    x[k] = xk + (-q).atan2(-p);
                    value = predicted;
                } else {
                    x[k] = xk;
                }
            }
            if evals + 1 > budget {
                break;
            }
            value = f(&x);
            evals += 1;
            if (start - value).abs() < self.tol {
                converged = true;
                break;
            }
        }
        Ok(Minimum {
            x,
            value,
            evaluations: evals,
            converged,
        })
    }
}

fn check(x0: &[f64], budget: usize) -> Result<()> {
    if x0.is_empty() {
        return Err(Error::arg("optimizer needs at least one parameter"));
    }
    if budget < x0.len() + 2 {
        return Err(Error::arg(format!(
            "budget {budget} too small for {} parameters",
            x0.len()
        )));
    }
    Ok(())
}

fn make_cobyla(ctx: &OptimizerContext) -> Result<Box<dyn Optimizer>> {
    Ok(Box::new(Cobyla {
        tol: ctx.tol,
        initial_step: 0.5,
    }))
}

fn make_rotosolve(ctx: &OptimizerContext) -> Result<Box<dyn Optimizer>> {
    Ok(Box::new(Rotosolve { tol: ctx.tol }))
}

pub fn optimizer_registry() -> Registry<dyn Optimizer, OptimizerContext> {
    Registry::new("optimizer")
        .with("cobyla", make_cobyla)
        .with("rotosolve", make_rotosolve)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trig(x: &[f64]) -> f64 {
        // minimum -3 at (pi, -pi/2)
        x[0].cos() + 2.0 * x[1].sin() + 0.0 * x[0]
    }

    #[test]
    fn registry_names() {
        let r = optimizer_registry();
        assert_eq!(r.names(), vec!["cobyla", "rotosolve"]);
        assert!(r.create("bfgs", &OptimizerContext::default()).is_err());
    }

    #[test]
    fn both_find_trig_minimum() {
        let ctx = OptimizerContext { tol: 1e-10 };
        for name in ["cobyla", "rotosolve"] {
            let opt = optimizer_registry().create(name, &ctx).unwrap();
            let mut f = |x: &[f64]| trig(x);
            let m = opt.minimize(&mut f, &[2.0, 0.0], 400).unwrap();
            assert!((m.value + 3.0).abs() < 1e-6, "{name}: {}", m.value);
            assert!(m.evaluations <= 400);
            assert!((trig(&m.x) - m.value).abs() < 1e-9, "{name}");
        }
    }

    #[test]
    fn budget_respected() {
        let opt = Cobyla {
            tol: 0.0,
            initial_step: 0.5,
        };
        let mut count = 0;
        let mut f = |x: &[f64]| {
            count += 1;
            x.iter().map(|v| (v - 1.0).powi(2)).sum::<f64>()
        };
        let m = opt.minimize(&mut f, &[0.0; 5], 30).unwrap();
        assert!(m.evaluations <= 30);
        assert!(!m.converged || m.value < 1e-6);
        assert!(opt.minimize(&mut |_: &[f64]| 0.0, &[0.0; 5], 3).is_err());
    }
}
