//! Projected subgradient method with Polyak or diminishing steps.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepRule {
    /// `(f(x) - target) / ||g||^2`, where `target` is a lower bound on the optimum.
    Polyak { target: f64 },
    /// `c / sqrt(k + 1)`.
    Diminishing { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubgradientStatus {
    Converged,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgradientReport {
    pub status: SubgradientStatus,
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Minimize a convex function given `oracle(x) -> (f(x), subgradient)`.
///
/// With a Polyak target the run stops once the best value is within `tol` of it.
/// With diminishing steps the best iterate after `budget` steps is returned.
pub fn projected_subgradient<O, P>(
    mut oracle: O,
    project: P,
    x0: &[f64],
    rule: StepRule,
    budget: usize,
    tol: f64,
) -> SubgradientReport
where
    O: FnMut(&[f64]) -> (f64, Vec<f64>),
    P: Fn(&mut Vec<f64>),
{
    let mut x = x0.to_vec();
    project(&mut x);
    let mut best_x = x.clone();
    let mut best = f64::INFINITY;
    for k in 0..budget {
        let (fx, g) = oracle(&x);
        if fx < best {
            best = fx;
            best_x.clone_from(&x);
        }
        if let StepRule::Polyak { target } = rule {
            if best - target <= tol {
                return SubgradientReport { status: SubgradientStatus::Converged, x: best_x, value: best, iterations: k };
            }
        }
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if gg == 0.0 {
            // Zero subgradient certifies optimality.
            return SubgradientReport { status: SubgradientStatus::Converged, x: best_x, value: best, iterations: k };
        }
        let step = match rule {
            StepRule::Polyak { target } => (fx - target).max(0.0) / gg,
            StepRule::Diminishing { c } => c / ((k + 1) as f64).sqrt() / gg.sqrt(),
        };
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= step * gi;
        }
        project(&mut x);
    }
    let (fx, _) = oracle(&x);
    if fx < best {
        best = fx;
        best_x = x;
    }
    let status = match rule {
        StepRule::Polyak { target } if best - target <= tol => SubgradientStatus::Converged,
        StepRule::Polyak { .. } => SubgradientStatus::IterationLimit,
        StepRule::Diminishing { .. } => SubgradientStatus::IterationLimit,
    };
    SubgradientReport { status, x: best_x, value: best, iterations: budget }
}
