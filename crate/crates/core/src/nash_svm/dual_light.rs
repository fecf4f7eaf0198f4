//! `max sum_j q_j  s.t.  ||sum_j q_j y_j x_j|| <= eps,  0 <= q_j <= w_j`.
//!
//! The 1- and infinity-norm balls are polyhedral and the program is an exact
//! LP. The 2-norm ball is handled by a log-barrier method on the same program.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::domain::{LabeledDataset, Norm};
use crate::error::{Error, Result};
use crate::solvers::barrier::barrier_minimize;
use crate::solvers::numeric::pairwise_sum;
use crate::solvers::{lp_solve, LinearProgram, LpStatus, RowSense, Sense};

/// Objective perturbation per index; among tied optima lower indices win.
const TIE_BREAK: f64 = 1e-12;
/// `q_j` at or below this fraction of `w_j` counts as zero.
const SUPPORT_REL: f64 = 1e-7;
const BARRIER_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualLightSolution {
    pub q: Vec<f64>,
    pub value: f64,
    /// `-sum_j q_j y_j x_j`.
    pub xi: Vec<f64>,
    pub j_zero: Vec<usize>,
    pub j_plus: Vec<usize>,
}

/// `sum_j q_j y_j x_j`.
pub(crate) fn aggregate(data: &LabeledDataset, q: &[f64]) -> Vec<f64> {
    let d = data.feature_dim();
    (0..d)
        .map(|i| {
            let terms: Vec<f64> =
                data.features().iter().zip(data.labels()).zip(q).map(|((x, y), qj)| qj * y * x[i]).collect();
            pairwise_sum(&terms)
        })
        .collect()
}

pub fn solve_dual_light(data: &LabeledDataset, norm: Norm, eps: f64) -> Result<DualLightSolution> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    if data.is_empty() {
        return Err(Error::InvalidInput("dataset is empty".into()));
    }
    let raw = match norm {
        Norm::One | Norm::Infinity => dual_lp(data, norm, eps)?,
        Norm::Two => dual_barrier(data, eps)?,
    };
    Ok(finalize(data, norm, eps, raw))
}

fn dual_lp(data: &LabeledDataset, norm: Norm, eps: f64) -> Result<Vec<f64>> {
    let jn = data.len();
    let d = data.feature_dim();
    let w = data.weights();
    // Column of sample j in the aggregate: y_j x_j.
    let col = |j: usize, i: usize| data.labels()[j] * data.features()[j][i];
    let obj = |n_vars: usize| {
        let mut c = vec![0.0; n_vars];
        for (j, cj) in c.iter_mut().enumerate().take(jn) {
            *cj = 1.0 - TIE_BREAK * j as f64;
        }
        c
    };
    let lp = match norm {
        Norm::Infinity => {
            let mut lp = LinearProgram::new(Sense::Maximize, obj(jn));
            for i in 0..d {
                let row: Vec<f64> = (0..jn).map(|j| col(j, i)).collect();
                lp.add_row(row.clone(), RowSense::Le, eps);
                lp.add_row(row, RowSense::Ge, -eps);
            }
            lp
        }
        Norm::One => {
            // Extra variables a_i >= |(sum q y x)_i| with sum a <= eps.
            let n = jn + d;
            let mut lp = LinearProgram::new(Sense::Maximize, obj(n));
            for i in 0..d {
                let mut pos = vec![0.0; n];
                let mut neg = vec![0.0; n];
                for j in 0..jn {
                    pos[j] = col(j, i);
                    neg[j] = -col(j, i);
                }
                pos[jn + i] = -1.0;
                neg[jn + i] = -1.0;
                lp.add_row(pos, RowSense::Le, 0.0);
                lp.add_row(neg, RowSense::Le, 0.0);
            }
            let mut budget = vec![0.0; n];
            budget[jn..].iter_mut().for_each(|b| *b = 1.0);
            lp.add_row(budget, RowSense::Le, eps);
            lp
        }
        Norm::Two => unreachable!("2-norm dual is not polyhedral"),
    };
    let mut lp = lp;
    for (j, wj) in w.iter().enumerate() {
        lp.set_bounds(j, 0.0, *wj);
    }
    let report = lp_solve(&lp)?;
    if report.status != LpStatus::Optimal {
        return Err(Error::NoConvergence { iterations: report.iterations, gap: f64::NAN });
    }
    Ok(report.primal[..jn].iter().zip(w).map(|(q, wj)| q.clamp(0.0, *wj)).collect())
}

fn dual_barrier(data: &LabeledDataset, eps: f64) -> Result<Vec<f64>> {
    let jn = data.len();
    let d = data.feature_dim();
    let w = DVector::from_column_slice(data.weights());
    let a = DMatrix::from_fn(d, jn, |i, j| data.labels()[j] * data.features()[j][i]);
    let gram = a.transpose() * &a;
    let eps2 = eps * eps;

    let aw = (&a * &w).norm();
    let shrink = if aw > 0.0 { (eps / (2.0 * aw)).min(0.5) } else { 0.5 };
    let q0 = &w * shrink;

    let wv = w.clone();
    let barrier = |q: &DVector<f64>| {
        let mut value = 0.0;
        let mut g = DVector::zeros(jn);
        let mut h = DMatrix::zeros(jn, jn);
        for j in 0..jn {
            let (lo, hi) = (q[j], wv[j] - q[j]);
            if !(lo > 0.0 && hi > 0.0) {
                return None;
            }
            value -= lo.ln() + hi.ln();
            g[j] = -1.0 / lo + 1.0 / hi;
            h[(j, j)] = 1.0 / (lo * lo) + 1.0 / (hi * hi);
        }
        let gq = &gram * q;
        let slack = eps2 - q.dot(&gq);
        if !(slack > 0.0) {
            return None;
        }
        value -= slack.ln();
        g.axpy(2.0 / slack, &gq, 1.0);
        h += &gram * (2.0 / slack);
        h.ger(4.0 / (slack * slack), &gq, &gq, 1.0);
        Some((value, g, h))
    };
    let c = DVector::from_element(jn, -1.0);
    let report = barrier_minimize(&c, barrier, (2 * jn + 1) as f64, q0, BARRIER_TOL)?;
    Ok(report.x.iter().zip(data.weights()).map(|(q, wj)| q.clamp(0.0, *wj)).collect())
}

/// Snap negligible entries to zero, restore feasibility by scaling and derive
/// the index sets and `xi`.
fn finalize(data: &LabeledDataset, norm: Norm, eps: f64, mut q: Vec<f64>) -> DualLightSolution {
    let w = data.weights();
    for (qj, wj) in q.iter_mut().zip(w) {
        if *qj <= SUPPORT_REL * wj {
            *qj = 0.0;
        }
    }
    let agg = aggregate(data, &q);
    let size = norm.eval(&agg);
    if size > eps {
        let f = eps / size;
        q.iter_mut().for_each(|qj| *qj *= f);
    }
    let agg = aggregate(data, &q);
    let (j_zero, j_plus): (Vec<usize>, Vec<usize>) = (0..q.len()).partition(|&j| q[j] == 0.0);
    DualLightSolution { value: pairwise_sum(&q), xi: agg.iter().map(|v| -v).collect(), q, j_zero, j_plus }
}
