//! Adaptive golden ratio algorithm (aGRAAL) for monotone operators on a
//! closed convex set, applied here to gradients of convex objectives.
//!
//! Step rule, with `rho = 1/phi + 1/phi^2`:
//! `lam_k = min(rho lam_{k-1}, phi th_{k-1} |x_k - x_{k-1}|^2 / (4 lam_{k-1} |F x_k - F x_{k-1}|^2), lam_max)`,
//! `xbar_k = ((phi - 1) x_k + xbar_{k-1}) / phi`, `x_{k+1} = P(xbar_k - lam_k F x_k)`,
//! `th_k = phi lam_k / lam_{k-1}`.

use serde::{Deserialize, Serialize};

pub const GOLDEN: f64 = 1.618_033_988_749_895;
/// Default `phi`. At `phi = GOLDEN` the growth factor `rho` is exactly 1, so
/// steps can only shrink and the method stalls after one sharp curvature spike.
pub const DEFAULT_PHI: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraalOptions {
    pub phi: f64,
    pub lambda_max: f64,
    pub max_iter: usize,
    /// Relative change of the best objective over `window` iterations.
    pub tol: f64,
    pub window: usize,
}

impl Default for GraalOptions {
    fn default() -> Self {
        GraalOptions { phi: DEFAULT_PHI, lambda_max: 1e6, max_iter: 50_000, tol: 1e-10, window: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraalReport {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best objective value after each iteration.
    pub trace: Vec<f64>,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Run aGRAAL from `x0`. `oracle(x)` returns `(f(x), grad f(x))`; `project`
/// maps a point onto the feasible set in place.
pub fn adaptive_golden_ratio<O, P>(mut oracle: O, project: P, x0: &[f64], opts: &GraalOptions) -> GraalReport
where
    O: FnMut(&[f64]) -> (f64, Vec<f64>),
    P: Fn(&mut Vec<f64>),
{
    let phi = opts.phi.clamp(1.0 + 1e-6, GOLDEN);
    let rho = 1.0 / phi + 1.0 / (phi * phi);
    let mut x_prev = x0.to_vec();
    project(&mut x_prev);
    let (f_prev, g_prev) = oracle(&x_prev);
    let mut best_x = x_prev.clone();
    let mut best = f_prev;

    // Second point from a small trial step; initial step from the local
    // Lipschitz estimate of the two gradients.
    let gnorm = g_prev.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
    let mut x = x_prev.iter().zip(&g_prev).map(|(xi, gi)| xi - 1e-3 * gi / gnorm).collect::<Vec<_>>();
    project(&mut x);
    if dist2(&x, &x_prev) == 0.0 {
        x = x_prev.iter().map(|v| v + 1e-6).collect();
        project(&mut x);
    }
    let (mut fx, mut gx) = oracle(&x);
    let mut g_old = g_prev;
    let num = dist2(&x, &x_prev).sqrt();
    let den = dist2(&gx, &g_old).sqrt();
    let mut lam_prev = if den > 0.0 && num > 0.0 { (num / den).min(opts.lambda_max) } else { 1e-3 };
    let mut theta = 1.0;
    let mut xbar = x.clone();
    let mut trace = Vec::new();

    for k in 0..opts.max_iter {
        if fx < best {
            best = fx;
            best_x.clone_from(&x);
        }
        trace.push(best);
        if k >= opts.window {
            let old = trace[k - opts.window];
            if (old - best).abs() <= opts.tol * best.abs().max(1.0) {
                return GraalReport { x: best_x, value: best, iterations: k, converged: true, trace };
            }
        }
        let dx = dist2(&x, &x_prev);
        let dg = dist2(&gx, &g_old);
        let mut lam = rho * lam_prev;
        if dg > 0.0 {
            lam = lam.min(phi * theta * dx / (4.0 * lam_prev * dg));
        }
        lam = lam.min(opts.lambda_max);
        if !(lam > 0.0) {
            lam = 1e-12;
        }
        for (b, xi) in xbar.iter_mut().zip(&x) {
            *b = ((phi - 1.0) * xi + *b) / phi;
        }
        let mut x_next: Vec<f64> = xbar.iter().zip(&gx).map(|(b, g)| b - lam * g).collect();
        project(&mut x_next);
        theta = phi * lam / lam_prev;
        lam_prev = lam;
        x_prev = std::mem::replace(&mut x, x_next);
        g_old = std::mem::take(&mut gx);
        let (f_new, g_new) = oracle(&x);
        fx = f_new;
        gx = g_new;
    }
    if fx < best {
        best = fx;
        best_x = x;
    }
    trace.push(best);
    GraalReport { x: best_x, value: best, iterations: opts.max_iter, converged: false, trace }
}
