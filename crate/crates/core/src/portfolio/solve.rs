//! `min_{theta in simplex, lambda >= 1/||theta||_0} lambda eps + sum_j w_j l_c(theta, lambda, zhat_j)`.
//!
//! Solvers are registered by name: `graal` (adaptive golden ratio) and
//! `projected_gradient` (backtracking projected gradient). Both work on
//! `x = (theta, lambda)`; the projection maps `theta` onto the simplex and
//! clamps `lambda` to `[1/||theta||_0 + slack, max(1, 1/||theta||_0 + slack)]`.
//! For `lambda >= 1` the c-transform equals the nominal loss, so larger
//! multipliers only add `lambda eps`.

use serde::{Deserialize, Serialize};

use super::ctransform::{gradients_at, portfolio_ctransform, support_size};
use crate::error::{Error, Result};
use crate::registry::Registry;
use crate::solvers::numeric::{dot, weighted_sum};
use crate::solvers::{adaptive_golden_ratio, project_simplex, GraalOptions};

/// Slack in `lambda >= 1/||theta||_0`.
pub const LAMBDA_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioProblem {
    samples: Vec<Vec<f64>>,
    weights: Vec<f64>,
    eps: f64,
}

impl PortfolioProblem {
    /// `eps = 0` gives the sample average approximation.
    pub fn new(samples: Vec<Vec<f64>>, weights: Vec<f64>, eps: f64) -> Result<Self> {
        crate::domain::DiscreteDistribution::new(samples.clone(), weights.clone())?;
        if samples.iter().flatten().any(|z| !(*z > 0.0) || z.is_infinite()) {
            return Err(Error::Domain("gross returns must be positive and finite".into()));
        }
        if !(eps >= 0.0) || eps.is_infinite() {
            return Err(Error::InvalidInput(format!("eps must be finite and nonnegative, got {eps}")));
        }
        Ok(PortfolioProblem { samples, weights, eps })
    }

    pub fn uniform(samples: Vec<Vec<f64>>, eps: f64) -> Result<Self> {
        let n = samples.len().max(1);
        PortfolioProblem::new(samples, vec![1.0 / n as f64; n], eps)
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.samples[0].len()
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        PortfolioProblem::new(self.samples.clone(), self.weights.clone(), eps)
    }

    /// Objective value and gradients; `+inf` with empty gradients outside the domain.
    pub fn evaluate(&self, theta: &[f64], lambda: f64) -> Result<(f64, Vec<f64>, f64)> {
        let d = self.dim();
        let mut vals = Vec::with_capacity(self.samples.len());
        let mut grad_theta = vec![0.0; d];
        let mut grad_lambda = 0.0;
        for (z, w) in self.samples.iter().zip(&self.weights) {
            let ct = portfolio_ctransform(theta, lambda, z)?;
            if ct.value.is_infinite() {
                return Ok((f64::INFINITY, Vec::new(), f64::NAN));
            }
            vals.push(ct.value);
            let (gt, gl) = gradients_at(theta, lambda, z, self.eps, ct.gamma_star);
            for (a, b) in grad_theta.iter_mut().zip(&gt) {
                *a += w * b;
            }
            grad_lambda += w * gl;
        }
        Ok((lambda * self.eps + weighted_sum(&self.weights, &vals), grad_theta, grad_lambda))
    }

    pub fn value(&self, theta: &[f64], lambda: f64) -> Result<f64> {
        Ok(self.evaluate(theta, lambda)?.0)
    }

    /// `E[-log <theta, Z>]` under the reference distribution.
    pub fn nominal_loss(&self, theta: &[f64]) -> f64 {
        let vals: Vec<f64> = self.samples.iter().map(|z| -dot(theta, z).ln()).collect();
        weighted_sum(&self.weights, &vals)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Relative objective change over `window` iterations that counts as converged.
    pub tol: f64,
    pub max_iter: usize,
    pub window: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-10, max_iter: 50_000, window: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroSolution {
    pub theta: Vec<f64>,
    pub lambda: f64,
    pub value: f64,
    /// Not available for first-order solvers without a dual certificate.
    pub duality_gap: Option<f64>,
    pub iterations: usize,
    /// Best objective after each iteration.
    pub trace: Vec<f64>,
    pub solver: String,
}

pub trait PortfolioSolver: Send + Sync {
    /// Best `(theta, lambda)` found, iterations used, whether the stopping rule
    /// fired, and the trace.
    fn run(&self, problem: &PortfolioProblem, start: &[f64], opts: &SolveOptions) -> Result<(Vec<f64>, usize, bool, Vec<f64>)>;
}

struct Graal;
struct ProjectedGradient;

pub fn portfolio_registry() -> Registry<dyn PortfolioSolver> {
    let mut r: Registry<dyn PortfolioSolver> = Registry::new();
    r.register("graal", Box::new(Graal)).expect("fresh registry");
    r.register("projected_gradient", Box::new(ProjectedGradient)).expect("fresh registry");
    r
}

/// Project `x = (theta, lambda)` in place.
pub fn project_feasible(x: &mut Vec<f64>) {
    let d = x.len() - 1;
    let theta = project_simplex(&x[..d]);
    let lo = 1.0 / support_size(&theta).max(1) as f64 + LAMBDA_SLACK;
    let hi = lo.max(1.0);
    let lam = if x[d].is_nan() { hi } else { x[d].clamp(lo, hi) };
    x[..d].copy_from_slice(&theta);
    x[d] = lam;
}

fn oracle(problem: &PortfolioProblem) -> impl Fn(&[f64]) -> (f64, Vec<f64>) + '_ {
    move |x: &[f64]| {
        let d = x.len() - 1;
        match problem.evaluate(&x[..d], x[d]) {
            Ok((f, mut g, gl)) if f.is_finite() => {
                g.push(gl);
                (f, g)
            }
            _ => (f64::INFINITY, vec![0.0; x.len()]),
        }
    }
}

impl PortfolioSolver for Graal {
    fn run(&self, problem: &PortfolioProblem, start: &[f64], opts: &SolveOptions) -> Result<(Vec<f64>, usize, bool, Vec<f64>)> {
        let g_opts = GraalOptions { max_iter: opts.max_iter, tol: opts.tol, window: opts.window, ..GraalOptions::default() };
        let r = adaptive_golden_ratio(oracle(problem), project_feasible, start, &g_opts);
        Ok((r.x, r.iterations, r.converged, r.trace))
    }
}

impl PortfolioSolver for ProjectedGradient {
    fn run(&self, problem: &PortfolioProblem, start: &[f64], opts: &SolveOptions) -> Result<(Vec<f64>, usize, bool, Vec<f64>)> {
        let f = oracle(problem);
        let mut x = start.to_vec();
        project_feasible(&mut x);
        let (mut fx, mut gx) = f(&x);
        let mut step = 1.0;
        let mut trace = Vec::new();
        for k in 0..opts.max_iter {
            trace.push(fx);
            if k >= opts.window && trace[k - opts.window] - fx <= opts.tol * fx.abs().max(1.0) {
                return Ok((x, k, true, trace));
            }
            let mut moved = false;
            for _ in 0..60 {
                let mut y: Vec<f64> = x.iter().zip(&gx).map(|(a, g)| a - step * g).collect();
                project_feasible(&mut y);
                let diff: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
                let dd = dot(&diff, &diff);
                if dd == 0.0 {
                    return Ok((x, k, true, trace));
                }
                let (fy, gy) = f(&y);
                if fy <= fx + dot(&gx, &diff) + dd / (2.0 * step) {
                    x = y;
                    fx = fy;
                    gx = gy;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                return Ok((x, k, true, trace));
            }
            step = (step * 1.5).min(1e6);
        }
        Ok((x, opts.max_iter, false, trace))
    }
}

/// Uniform weights and `lambda = 1`.
pub fn default_start(d: usize) -> Vec<f64> {
    let mut x = vec![1.0 / d as f64; d];
    x.push(1.0);
    x
}

pub fn solve_portfolio(problem: &PortfolioProblem, solver: &str, opts: &SolveOptions) -> Result<DroSolution> {
    solve_portfolio_from(problem, solver, opts, &default_start(problem.dim()))
}

/// As [`solve_portfolio`], warm-started at `start = (theta, lambda)`.
pub fn solve_portfolio_from(problem: &PortfolioProblem, solver: &str, opts: &SolveOptions, start: &[f64]) -> Result<DroSolution> {
    let (sol, converged) = solve_best_effort(problem, solver, opts, start)?;
    if !converged {
        let n = sol.trace.len();
        let gap = if n > opts.window { (sol.trace[n - 1 - opts.window] - sol.trace[n - 1]).abs() } else { f64::NAN };
        return Err(Error::NoConvergence { iterations: sol.iterations, gap });
    }
    Ok(sol)
}

/// Best iterate and whether the stopping rule fired, without failing on the
/// iteration limit.
pub fn solve_best_effort(problem: &PortfolioProblem, solver: &str, opts: &SolveOptions, start: &[f64]) -> Result<(DroSolution, bool)> {
    let d = problem.dim();
    if start.len() != d + 1 {
        return Err(Error::InvalidInput(format!("start point needs {} entries, got {}", d + 1, start.len())));
    }
    let registry = portfolio_registry();
    let (mut x, iterations, converged, trace) = registry.get(solver)?.run(problem, start, opts)?;
    project_feasible(&mut x);
    let lambda = x[d];
    let theta = x[..d].to_vec();
    let value = problem.value(&theta, lambda)?;
    Ok((DroSolution { theta, lambda, value, duality_gap: None, iterations, trace, solver: solver.to_string() }, converged))
}

/// Sample average approximation `min_theta E[-log <theta, Z>]` by projected
/// gradient on the empirical objective.
pub fn solve_saa(problem: &PortfolioProblem, opts: &SolveOptions) -> Result<(Vec<f64>, f64)> {
    let d = problem.dim();
    let f = |theta: &[f64]| -> (f64, Vec<f64>) {
        let mut g = vec![0.0; d];
        for (z, w) in problem.samples().iter().zip(problem.weights()) {
            let r = dot(theta, z);
            for (gi, zi) in g.iter_mut().zip(z) {
                *gi -= w * zi / r;
            }
        }
        (problem.nominal_loss(theta), g)
    };
    let mut x = vec![1.0 / d as f64; d];
    let (mut fx, mut gx) = f(&x);
    let mut step = 1.0;
    let mut history = Vec::new();
    for k in 0..opts.max_iter {
        history.push(fx);
        if k >= opts.window && history[k - opts.window] - fx <= opts.tol * fx.abs().max(1.0) {
            return Ok((x, fx));
        }
        let mut moved = false;
        for _ in 0..60 {
            let y = project_simplex(&x.iter().zip(&gx).map(|(a, g)| a - step * g).collect::<Vec<_>>());
            let diff: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let dd = dot(&diff, &diff);
            if dd == 0.0 {
                return Ok((x, fx));
            }
            let (fy, gy) = f(&y);
            if fy.is_finite() && fy <= fx + dot(&gx, &diff) + dd / (2.0 * step) {
                x = y;
                fx = fy;
                gx = gy;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            return Ok((x, fx));
        }
        step = (step * 1.5).min(1e6);
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, gap: f64::NAN })
}
