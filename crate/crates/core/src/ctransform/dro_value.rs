//! Worst-case expected loss over a transport ball via the one-dimensional dual
//! `inf_{lambda >= 0} lambda eps ||theta||_*^p + E[L_p(<theta, Z>, lambda)]`.

use serde::{Deserialize, Serialize};

use super::quadratic::quadratic_lambda_interval;
use crate::domain::{DiscreteDistribution, Norm};
use crate::envelopes::{envelope_value, UnivariateLoss};
use crate::error::{Error, Result};
use crate::solvers::golden_section_min;
use crate::solvers::numeric::{dot, weighted_sum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroValue {
    pub value: f64,
    /// Minimizing multiplier in envelope units; the c-transform multiplier is
    /// `lambda_star * scale`. Zero when `theta = 0`.
    pub lambda_star: f64,
    /// `||theta||_*^p`.
    pub scale: f64,
    pub per_sample_ctransforms: Vec<f64>,
}

const MAX_DOUBLINGS: usize = 200;

pub fn dro_value_via_envelope(
    loss: &UnivariateLoss,
    norm: Norm,
    p: u32,
    theta: &[f64],
    reference: &DiscreteDistribution,
    eps: f64,
) -> Result<DroValue> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    if theta.len() != reference.dim() {
        return Err(Error::InvalidInput(format!("theta has {} entries, atoms {}", theta.len(), reference.dim())));
    }
    let w = reference.weights();
    let n = norm.dual_eval(theta);
    if n == 0.0 {
        let l0 = loss.eval(0.0);
        return Ok(DroValue { value: l0, lambda_star: 0.0, scale: 0.0, per_sample_ctransforms: vec![l0; w.len()] });
    }
    let scale = n.powi(p as i32);
    let s: Vec<f64> = reference.atoms().iter().map(|z| dot(theta, z)).collect();

    let eval_err = std::cell::RefCell::new(None);
    let objective = |lambda: f64| -> f64 {
        let mut vals = Vec::with_capacity(s.len());
        for &sj in &s {
            match envelope_value(loss, p, sj, lambda) {
                Ok(v) => vals.push(v),
                Err(e) => {
                    eval_err.borrow_mut().get_or_insert(e);
                    return f64::INFINITY;
                }
            }
        }
        if vals.iter().any(|v| v.is_infinite()) {
            return f64::INFINITY;
        }
        lambda * eps * scale + weighted_sum(w, &vals)
    };

    let lambda_min = loss.growth_rate(p);
    if lambda_min.is_infinite() {
        return Err(Error::Infeasible(format!("{} grows too fast for exponent {p}", loss.name())));
    }
    let upper = match (p, loss.smoothness()) {
        (2, Some((m, _))) => {
            let second: Vec<f64> = s.iter().map(|&sj| loss.derivative(sj).powi(2)).collect();
            let interval = quadratic_lambda_interval(theta, norm, eps, m, weighted_sum(w, &second))?;
            let hi = interval.upper / scale;
            if hi > lambda_min {
                hi * (1.0 + 1e-9) + 1e-12
            } else {
                doubling_upper(&objective, lambda_min)
            }
        }
        _ => doubling_upper(&objective, lambda_min),
    };
    let tol = 1e-9 * upper.max(1.0);
    let golden = golden_section_min(&objective, lambda_min, upper, tol)?;
    let mut best = (golden.x, golden.fx);
    for cand in [lambda_min, upper] {
        let v = objective(cand);
        if v < best.1 {
            best = (cand, v);
        }
    }
    if !best.1.is_finite() {
        if let Some(e) = eval_err.into_inner() {
            return Err(e);
        }
        return Err(Error::Infeasible("dual objective is +inf for every lambda".into()));
    }
    let lambda_star = best.0;
    let per_sample: Result<Vec<f64>> = s.iter().map(|&sj| envelope_value(loss, p, sj, lambda_star)).collect();
    let per_sample = per_sample?;
    let value = lambda_star * eps * scale + weighted_sum(w, &per_sample);
    Ok(DroValue { value, lambda_star, scale, per_sample_ctransforms: per_sample })
}

/// Double from `max(1, 2 lambda_min)` until the objective has risen twice in a row.
fn doubling_upper<F: Fn(f64) -> f64>(f: &F, lambda_min: f64) -> f64 {
    let mut u = (2.0 * lambda_min).max(1.0).max(lambda_min + 1.0);
    let mut prev = f(u);
    let mut rises = 0;
    for _ in 0..MAX_DOUBLINGS {
        let next_u = 2.0 * u;
        let next = f(next_u);
        if next > prev {
            rises += 1;
        } else {
            rises = 0;
        }
        u = next_u;
        prev = next;
        if rises >= 2 {
            break;
        }
    }
    u
}
