//! c-transform through Toland duality:
//! `l_c(theta, lambda, zhat) = sup_{g in dom L*} lambda c*(g theta / lambda, zhat) - L*(g)`,
//! where `c*` is the conjugate of `c(., zhat)` in its first argument.

use std::sync::Arc;

use super::CTransformResult;
use crate::domain::Norm;
use crate::envelopes::ScalarFn;
use crate::error::{Error, Result};
use crate::solvers::golden::{linspace, refine_max_on_grid};
use crate::solvers::numeric::{dot, perspective};

pub type VectorFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Conjugate of a scalar loss restricted to a declared interval of its domain.
#[derive(Clone)]
pub struct LossConjugate {
    pub eval: ScalarFn,
    pub domain: (f64, f64),
}

/// Partial conjugate `x -> c*(x, zhat)` and its recession function
/// (the support function of `dom c(., zhat)`), used at `lambda = 0`.
#[derive(Clone)]
pub struct CostConjugate {
    pub eval: VectorFn,
    pub recession: VectorFn,
}

const GRID_POINTS: usize = 512;

fn support_of_whole_space(x: &[f64]) -> f64 {
    if x.iter().all(|v| *v == 0.0) {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `c*(x, zhat) = <x, zhat> + sup_t (t ||x||_* - t^p)`.
pub fn norm_power_conjugate(norm: Norm, p: u32, zhat: &[f64]) -> CostConjugate {
    let zhat = zhat.to_vec();
    let eval: VectorFn = Arc::new(move |x: &[f64]| {
        let n = norm.dual_eval(x);
        let lin = dot(x, &zhat);
        if p == 1 {
            if n <= 1.0 + 1e-15 {
                lin
            } else {
                f64::INFINITY
            }
        } else {
            let pf = p as f64;
            let q = pf / (pf - 1.0);
            lin + (pf - 1.0) * (n / pf).powf(q)
        }
    });
    CostConjugate { eval, recession: Arc::new(support_of_whole_space) }
}

/// `h(s) = -1 - log(-s)` for `s < -1`, `s` on `[-1, 0]`, `+inf` for `s > 0`.
pub fn h(s: f64) -> f64 {
    if s < -1.0 {
        -1.0 - (-s).ln()
    } else if s <= 0.0 {
        s
    } else {
        f64::INFINITY
    }
}

/// `h'(s)`; at `s = 0` the left derivative.
pub fn h_prime(s: f64) -> f64 {
    if s < -1.0 {
        -1.0 / s
    } else if s <= 0.0 {
        1.0
    } else {
        f64::NAN
    }
}

/// Conjugate of `c(z, zhat) = sum_i |log(z_i / zhat_i)|`: `sum_i h(x_i zhat_i)`.
pub fn log_metric_conjugate(zhat: &[f64]) -> CostConjugate {
    let zhat = zhat.to_vec();
    let eval: VectorFn = Arc::new(move |x: &[f64]| x.iter().zip(&zhat).map(|(a, b)| h(a * b)).sum());
    let recession: VectorFn = Arc::new(|x: &[f64]| if x.iter().all(|v| *v <= 0.0) { 0.0 } else { f64::INFINITY });
    CostConjugate { eval, recession }
}

fn gamma_grid(lo: f64, hi: f64) -> Vec<f64> {
    let decades = linspace(-8.0, 8.0, GRID_POINTS / 2);
    let mut g: Vec<f64> = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => linspace(lo, hi, GRID_POINTS),
        (true, false) => decades.iter().map(|u| lo + 10f64.powf(*u)).chain([lo]).collect(),
        (false, true) => decades.iter().map(|u| hi - 10f64.powf(*u)).chain([hi]).collect(),
        (false, false) => decades.iter().flat_map(|u| [10f64.powf(*u), -10f64.powf(*u)]).chain([0.0]).collect(),
    };
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Maximize the Toland dual over `gamma_domain`: a 512-point grid (log-spaced
/// on unbounded sides) followed by golden refinement of the best cell.
pub fn ctransform_toland(
    conj_loss: &LossConjugate,
    conj_cost: &CostConjugate,
    theta: &[f64],
    lambda: f64,
    gamma_domain: (f64, f64),
) -> Result<CTransformResult> {
    let (lo, hi) = gamma_domain;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::Domain(format!("empty gamma domain [{lo}, {hi}]")));
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidInput(format!("lambda must be nonnegative, got {lambda}")));
    }
    let g = |gamma: f64| {
        let x: Vec<f64> = theta.iter().map(|t| gamma * t).collect();
        let a = perspective(lambda, &x, |y| (conj_cost.eval)(y), |y| (conj_cost.recession)(y));
        let b = (conj_loss.eval)(gamma);
        let v = a - b;
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let grid = gamma_grid(lo, hi);
    let vals: Vec<f64> = grid.iter().map(|&x| g(x)).collect();
    if vals.iter().all(|v| *v == f64::INFINITY) {
        return Err(Error::NonFiniteObjective);
    }
    if let Some(i) = vals.iter().position(|v| *v == f64::INFINITY) {
        return Ok(CTransformResult { value: f64::INFINITY, gamma_star: Some(grid[i]), z_star: None });
    }
    if vals.iter().all(|v| *v == f64::NEG_INFINITY) {
        return Err(Error::NonFiniteObjective);
    }
    let best = refine_max_on_grid(g, &grid, 1e-13)?;
    Ok(CTransformResult { value: best.fx, gamma_star: Some(best.x), z_star: None })
}
