//! Saddle-point residuals of a candidate pair `(theta, Q)` and the full
//! primal / dual-light / least-favorable pipeline.

use serde::{Deserialize, Serialize};

use super::dual_light::{solve_dual_light, DualLightSolution};
use super::nash::{nash_family, Alpha, PerturbedDataset};
use super::primal::{solve_primal_svm, SvmPrimalSolution};
use super::worst_case::worst_case_value;
use crate::domain::{LabeledDataset, Norm, BALL_SLACK};
use crate::error::{Error, Result};
use crate::solvers::{lp_solve_with, LinearProgram, LpStatus, RowSense, Sense};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashCertificate {
    pub theta: Vec<f64>,
    /// Dual-light solution that generated `Q`, when known.
    pub family: Option<DualLightSolution>,
    /// `sup_{Q' in ball} E_Q'[loss(theta)] - E_Q[loss(theta)]`.
    pub left_residual: f64,
    /// `E_Q[loss(theta)] - min_theta' E_Q[loss(theta')]`.
    pub right_residual: f64,
    /// Certified upper bound on the transport cost of `Q`.
    pub transport_cost: f64,
}

/// `min_theta E_Q[max(0, 1 - y <theta, x>)]` as an LP. Returns the minimizer
/// and the minimum.
pub fn minimize_hinge(data: &LabeledDataset, max_iter: usize) -> Result<(Vec<f64>, f64)> {
    let jn = data.len();
    let d = data.feature_dim();
    let mut c = vec![0.0; d + jn];
    c[d..].copy_from_slice(data.weights());
    let mut lp = LinearProgram::new(Sense::Minimize, c);
    for i in 0..d {
        lp.set_bounds(i, f64::NEG_INFINITY, f64::INFINITY);
    }
    for (j, (x, y)) in data.features().iter().zip(data.labels()).enumerate() {
        let mut row = vec![0.0; d + jn];
        for i in 0..d {
            row[i] = y * x[i];
        }
        row[d + j] = 1.0;
        lp.add_row(row, RowSense::Ge, 1.0);
    }
    let report = lp_solve_with(&lp, &Tolerances::default(), max_iter)?;
    if report.status != LpStatus::Optimal {
        return Err(Error::NoConvergence { iterations: report.iterations, gap: f64::NAN });
    }
    let theta = report.primal[..d].to_vec();
    let value = super::empirical_hinge(data, &theta);
    Ok((theta, value))
}

/// Residuals of the saddle condition for `(theta, Q)`. `probe_budget` caps the
/// pivots of the inner hinge minimization.
pub fn verify_saddle(
    data: &LabeledDataset,
    norm: Norm,
    eps: f64,
    theta: &[f64],
    q: &PerturbedDataset,
    probe_budget: usize,
) -> Result<NashCertificate> {
    let mut cost = q.transport_spend(data, norm);
    if cost > eps + BALL_SLACK && q.atoms.len() <= crate::domain::transport::MAX_ATOMS && data.len() <= crate::domain::transport::MAX_ATOMS {
        cost = cost.min(q.transport_cost_exact(data, norm)?);
    }
    if cost > eps + BALL_SLACK {
        return Err(Error::InfeasibleQ { cost, eps });
    }
    let value_q = q.expected_hinge(theta);
    let left = worst_case_value(data, norm, eps, theta)? - value_q;
    let (_, best) = minimize_hinge(&q.to_dataset()?, probe_budget)?;
    let total = q.total_mass();
    let right = value_q - best * total;
    Ok(NashCertificate { theta: theta.to_vec(), family: None, left_residual: left, right_residual: right, transport_cost: cost })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashRun {
    pub primal: SvmPrimalSolution,
    pub dual: DualLightSolution,
    pub distribution: PerturbedDataset,
    pub certificate: NashCertificate,
}

/// Primal solve, dual-light solve, `Q*(alpha)` and its certificate.
pub fn nash_pipeline(data: &LabeledDataset, norm: Norm, eps: f64, alpha: &Alpha, tol: f64) -> Result<NashRun> {
    let primal = solve_primal_svm(data, norm, eps, tol)?;
    let dual = solve_dual_light(data, norm, eps)?;
    let weights = alpha.resolve(&dual)?;
    let distribution = nash_family(data, &dual, &weights)?;
    let mut certificate = verify_saddle(data, norm, eps, &primal.theta, &distribution, 50_000)?;
    certificate.family = Some(dual.clone());
    Ok(NashRun { primal, dual, distribution, certificate })
}
