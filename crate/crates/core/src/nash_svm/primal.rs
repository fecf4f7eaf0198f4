//! `min_theta eps ||theta||_* + sum_j w_j max(0, 1 - y_j <theta, x_j>)`.
//!
//! Strategies are registered by name: `lp` (polyhedral dual norms), `barrier`
//! (any norm, the natural choice for 2), `polyak` (subgradient descent aimed at
//! the dual-light value) and `auto`, which picks `lp` or `barrier`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::dual_light::solve_dual_light;
use super::{empirical_hinge, hinge};
use crate::domain::{LabeledDataset, Norm};
use crate::error::{Error, Result};
use crate::registry::Registry;
use crate::solvers::barrier::barrier_minimize;
use crate::solvers::numeric::dot;
use crate::solvers::{lp_solve, projected_subgradient, LinearProgram, LpStatus, RowSense, Sense, StepRule, SubgradientStatus};

pub const DEFAULT_BUDGET: usize = 200_000;
const BARRIER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmPrimalSolution {
    pub theta: Vec<f64>,
    /// `||theta||_*`.
    pub lambda: f64,
    pub slacks: Vec<f64>,
    pub value: f64,
    /// Primal value minus the dual-light value.
    pub duality_gap: f64,
    pub strategy: String,
}

pub trait PrimalStrategy: Send + Sync {
    /// Returns a minimizing `theta`.
    fn solve(&self, data: &LabeledDataset, norm: Norm, eps: f64, tol: f64) -> Result<Vec<f64>>;
}

struct LpStrategy;
struct BarrierStrategy;
struct PolyakStrategy {
    budget: usize,
}
struct AutoStrategy;

pub fn primal_registry() -> Registry<dyn PrimalStrategy> {
    let mut r: Registry<dyn PrimalStrategy> = Registry::new();
    r.register("auto", Box::new(AutoStrategy)).expect("fresh registry");
    r.register("lp", Box::new(LpStrategy)).expect("fresh registry");
    r.register("barrier", Box::new(BarrierStrategy)).expect("fresh registry");
    r.register("polyak", Box::new(PolyakStrategy { budget: DEFAULT_BUDGET })).expect("fresh registry");
    r
}

/// Solve with the `auto` strategy and certify the duality gap.
pub fn solve_primal_svm(data: &LabeledDataset, norm: Norm, eps: f64, tol: f64) -> Result<SvmPrimalSolution> {
    solve_primal_svm_with("auto", data, norm, eps, tol)
}

/// Solve with a named strategy; fails with `NoConvergence` when the gap to
/// the dual-light value exceeds `tol`.
pub fn solve_primal_svm_with(strategy: &str, data: &LabeledDataset, norm: Norm, eps: f64, tol: f64) -> Result<SvmPrimalSolution> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    if data.is_empty() {
        return Err(Error::InvalidInput("dataset is empty".into()));
    }
    let registry = primal_registry();
    let theta = registry.get(strategy)?.solve(data, norm, eps, tol)?;
    let lambda = norm.dual_eval(&theta);
    let slacks: Vec<f64> = data.features().iter().zip(data.labels()).map(|(x, y)| hinge(y * dot(&theta, x))).collect();
    let value = eps * lambda + empirical_hinge(data, &theta);
    let dual = solve_dual_light(data, norm, eps)?;
    let duality_gap = value - dual.value;
    if duality_gap > tol {
        return Err(Error::NoConvergence { iterations: 0, gap: duality_gap });
    }
    Ok(SvmPrimalSolution { theta, lambda, slacks, value, duality_gap, strategy: strategy.to_string() })
}

impl PrimalStrategy for AutoStrategy {
    fn solve(&self, data: &LabeledDataset, norm: Norm, eps: f64, tol: f64) -> Result<Vec<f64>> {
        match norm {
            Norm::One | Norm::Infinity => LpStrategy.solve(data, norm, eps, tol),
            Norm::Two => BarrierStrategy.solve(data, norm, eps, tol),
        }
    }
}

impl PrimalStrategy for LpStrategy {
    fn solve(&self, data: &LabeledDataset, norm: Norm, eps: f64, _tol: f64) -> Result<Vec<f64>> {
        let jn = data.len();
        let d = data.feature_dim();
        // Variables: theta (d, free), s (J), then the dual-norm epigraph block.
        let aux = match norm {
            Norm::One => 1,
            Norm::Infinity => d,
            Norm::Two => return Err(Error::InvalidInput("the lp strategy needs a polyhedral norm (1 or inf)".into())),
        };
        let n = d + jn + aux;
        let mut c = vec![0.0; n];
        c[d..d + jn].copy_from_slice(data.weights());
        c[d + jn..].iter_mut().for_each(|v| *v = eps);
        let mut lp = LinearProgram::new(Sense::Minimize, c);
        for i in 0..d {
            lp.set_bounds(i, f64::NEG_INFINITY, f64::INFINITY);
        }
        for (j, (x, y)) in data.features().iter().zip(data.labels()).enumerate() {
            // s_j + y_j <theta, x_j> >= 1.
            let mut row = vec![0.0; n];
            for i in 0..d {
                row[i] = y * x[i];
            }
            row[d + j] = 1.0;
            lp.add_row(row, RowSense::Ge, 1.0);
        }
        for i in 0..d {
            // One-norm transport: t >= |theta_i|. Infinity: u_i >= |theta_i|.
            let k = if norm == Norm::One { d + jn } else { d + jn + i };
            for sign in [1.0, -1.0] {
                let mut row = vec![0.0; n];
                row[i] = sign;
                row[k] = -1.0;
                lp.add_row(row, RowSense::Le, 0.0);
            }
        }
        let report = lp_solve(&lp)?;
        if report.status != LpStatus::Optimal {
            return Err(Error::NoConvergence { iterations: report.iterations, gap: f64::NAN });
        }
        Ok(report.primal[..d].to_vec())
    }
}

impl PrimalStrategy for BarrierStrategy {
    fn solve(&self, data: &LabeledDataset, norm: Norm, eps: f64, tol: f64) -> Result<Vec<f64>> {
        if norm != Norm::Two {
            // Polyhedral norms are exact through the LP.
            return LpStrategy.solve(data, norm, eps, tol);
        }
        let jn = data.len();
        let d = data.feature_dim();
        let n = d + jn + 1;
        let mut c = DVector::zeros(n);
        for j in 0..jn {
            c[d + j] = data.weights()[j];
        }
        c[n - 1] = eps;
        // Row j of the margin constraints: s_j + y_j <theta, x_j> - 1 > 0.
        let ay = DMatrix::from_fn(jn, d, |j, i| data.labels()[j] * data.features()[j][i]);
        let barrier = |v: &DVector<f64>| {
            let th = v.rows(0, d);
            let t = v[n - 1];
            let margins = &ay * th;
            let mut value = 0.0;
            let mut g = DVector::zeros(n);
            let mut h = DMatrix::zeros(n, n);
            let mut weights = DVector::zeros(jn);
            for j in 0..jn {
                let sj = v[d + j];
                let r = sj + margins[j] - 1.0;
                if !(r > 0.0 && sj > 0.0) {
                    return None;
                }
                value -= r.ln() + sj.ln();
                g[d + j] = -1.0 / r - 1.0 / sj;
                weights[j] = 1.0 / (r * r);
                h[(d + j, d + j)] = 1.0 / (r * r) + 1.0 / (sj * sj);
            }
            // theta rows of the margin terms and their cross terms with s.
            for j in 0..jn {
                let r = v[d + j] + margins[j] - 1.0;
                for i in 0..d {
                    g[i] -= ay[(j, i)] / r;
                    h[(i, d + j)] += ay[(j, i)] * weights[j];
                    h[(d + j, i)] += ay[(j, i)] * weights[j];
                }
            }
            let scaled = DMatrix::from_fn(jn, d, |j, i| ay[(j, i)] * weights[j]);
            let block = ay.transpose() * scaled;
            let mut top = h.view_mut((0, 0), (d, d));
            top += block;
            // Second-order cone t >= ||theta||: -log(t^2 - ||theta||^2), t > 0.
            let gap = t * t - th.norm_squared();
            if !(t > 0.0 && gap > 0.0) {
                return None;
            }
            value -= gap.ln();
            let mut gc = DVector::zeros(n);
            gc.rows_mut(0, d).copy_from(&(th * (2.0 / gap)));
            gc[n - 1] = -2.0 * t / gap;
            g += &gc;
            for i in 0..d {
                h[(i, i)] += 2.0 / gap;
            }
            h[(n - 1, n - 1)] -= 2.0 / gap;
            // Hessian of -log(gap) is (grad gap)(grad gap)'/gap^2 - Hess(gap)/gap.
            h.ger(1.0, &gc, &gc, 1.0);
            Some((value, g, h))
        };
        let mut x0 = DVector::zeros(n);
        for j in 0..jn {
            x0[d + j] = 2.0;
        }
        x0[n - 1] = 1.0;
        let report = barrier_minimize(&c, barrier, (2 * jn + 2) as f64, x0, BARRIER_TOL)?;
        Ok(report.x.rows(0, d).iter().copied().collect())
    }
}

impl PrimalStrategy for PolyakStrategy {
    fn solve(&self, data: &LabeledDataset, norm: Norm, eps: f64, tol: f64) -> Result<Vec<f64>> {
        let target = solve_dual_light(data, norm, eps)?.value;
        let d = data.feature_dim();
        let oracle = |theta: &[f64]| {
            let (lam, witness) = norm.dual_norm_witness(theta);
            let mut g: Vec<f64> = witness.iter().map(|v| eps * v).collect();
            for ((x, y), w) in data.features().iter().zip(data.labels()).zip(data.weights()) {
                if 1.0 - y * dot(theta, x) > 0.0 {
                    for i in 0..d {
                        g[i] -= w * y * x[i];
                    }
                }
            }
            (eps * lam + empirical_hinge(data, theta), g)
        };
        let r = projected_subgradient(oracle, |_| {}, &vec![0.0; d], StepRule::Polyak { target }, self.budget, tol);
        if r.status != SubgradientStatus::Converged {
            return Err(Error::NoConvergence { iterations: r.iterations, gap: r.value - target });
        }
        Ok(r.x)
    }
}
