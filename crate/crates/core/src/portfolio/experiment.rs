//! Out-of-sample comparison of SAA and robust log-optimal portfolios on
//! synthetic lognormal returns.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solve::{default_start, solve_best_effort, PortfolioProblem, SolveOptions};
use crate::error::{Error, Result};
use crate::solvers::numeric::pairwise_sum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub n_trials: usize,
    /// Radii to fit; `0` is the sample average approximation.
    pub eps_grid: Vec<f64>,
    pub seed: u64,
    /// Mean of `log Z`.
    pub log_mean: Vec<f64>,
    /// Covariance of `log Z`.
    pub log_cov: Vec<Vec<f64>>,
    pub solver: String,
    pub options: SolveOptions,
}

/// `{a 10^b : a = 1..10, b = -4..-1}` together with `0`, sorted and deduplicated.
pub fn default_eps_grid() -> Vec<f64> {
    let mut grid = vec![0.0];
    for b in -4..=-1 {
        for a in 1..=10 {
            grid.push(a as f64 * 10f64.powi(b));
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    grid
}

impl ExperimentConfig {
    /// Drifts spread evenly over `[0, 0.3]` and log-covariance `0.5 I`.
    pub fn with_defaults(d: usize, n_train: usize, n_test: usize, n_trials: usize, seed: u64) -> Self {
        let log_mean = (0..d).map(|i| if d > 1 { DEFAULT_DRIFT_SPREAD * i as f64 / (d - 1) as f64 } else { 0.0 }).collect();
        let log_cov = (0..d).map(|i| (0..d).map(|j| if i == j { DEFAULT_LOG_VAR } else { 0.0 }).collect()).collect();
        ExperimentConfig {
            d,
            n_train,
            n_test,
            n_trials,
            eps_grid: default_eps_grid(),
            seed,
            log_mean,
            log_cov,
            solver: "graal".into(),
            options: SolveOptions { tol: 1e-8, max_iter: 20_000, window: 200 },
        }
    }

    fn validate(&self) -> Result<DMatrix<f64>> {
        if self.d == 0 || self.n_train == 0 || self.n_test == 0 {
            return Err(Error::InvalidInput("d, n_train and n_test must be positive".into()));
        }
        if self.log_mean.len() != self.d || self.log_cov.len() != self.d || self.log_cov.iter().any(|r| r.len() != self.d) {
            return Err(Error::InvalidInput(format!("log_mean and log_cov must have dimension {}", self.d)));
        }
        if self.eps_grid.iter().any(|e| !(*e >= 0.0) || e.is_infinite()) {
            return Err(Error::InvalidInput("eps grid must be finite and nonnegative".into()));
        }
        let cov = DMatrix::from_fn(self.d, self.d, |i, j| self.log_cov[i][j]);
        let chol = cov.cholesky().ok_or_else(|| Error::InvalidInput("log_cov is not positive definite".into()))?;
        Ok(chol.l())
    }
}

const DEFAULT_LOG_VAR: f64 = 0.5;
const DEFAULT_DRIFT_SPREAD: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub trial: usize,
    pub eps: f64,
    /// `E[-log <theta, Z>]` over the test sample.
    pub out_of_sample_loss: f64,
    /// Mean of `<theta, Z> - 1` over the test sample.
    pub mean_return: f64,
    /// Mean over standard deviation of `<theta, Z> - 1`.
    pub sharpe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub eps: f64,
    pub mean_loss: f64,
    pub se_loss: f64,
    /// Mean of the per-trial loss minus the SAA loss of the same trial.
    pub mean_diff: f64,
    pub se_diff: f64,
    pub mean_return: f64,
    pub mean_sharpe: f64,
}

fn sample_returns(rng: &mut ChaCha8Rng, n: usize, mean: &DVector<f64>, chol: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let d = mean.len();
    (0..n)
        .map(|_| {
            let xi = DVector::from_fn(d, |_, _| StandardNormal.sample(rng));
            (mean + chol * xi).iter().map(|v| v.exp()).collect()
        })
        .collect()
}

fn evaluate(theta: &[f64], test: &[Vec<f64>]) -> (f64, f64, f64) {
    let r: Vec<f64> = test.iter().map(|z| crate::solvers::numeric::dot(theta, z)).collect();
    let n = r.len() as f64;
    let loss = pairwise_sum(&r.iter().map(|v| -v.ln()).collect::<Vec<_>>()) / n;
    let mean = pairwise_sum(&r.iter().map(|v| v - 1.0).collect::<Vec<_>>()) / n;
    let var = pairwise_sum(&r.iter().map(|v| (v - 1.0 - mean).powi(2)).collect::<Vec<_>>()) / (n - 1.0).max(1.0);
    let sharpe = if var > 0.0 { mean / var.sqrt() } else { f64::NAN };
    (loss, mean, sharpe)
}

fn run_trial(cfg: &ExperimentConfig, chol: &DMatrix<f64>, trial: usize) -> Result<Vec<ExperimentRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);
    let mean = DVector::from_column_slice(&cfg.log_mean);
    let train = sample_returns(&mut rng, cfg.n_train, &mean, chol);
    let test = sample_returns(&mut rng, cfg.n_test, &mean, chol);
    let base = PortfolioProblem::uniform(train, 0.0)?;
    let mut grid = cfg.eps_grid.clone();
    grid.sort_by(f64::total_cmp);
    let mut start = default_start(cfg.d);
    let mut rows = Vec::with_capacity(grid.len());
    for eps in grid {
        let problem = base.with_eps(eps)?;
        let (sol, _) = solve_best_effort(&problem, &cfg.solver, &cfg.options, &start)?;
        start = sol.theta.clone();
        start.push(sol.lambda);
        let (loss, mean_return, sharpe) = evaluate(&sol.theta, &test);
        rows.push(ExperimentRow { trial, eps, out_of_sample_loss: loss, mean_return, sharpe });
    }
    Ok(rows)
}

/// Rows ordered by trial, then by increasing radius. Trials run on the current
/// rayon pool; each draws from its own stream of the seeded generator.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    let chol = cfg.validate()?;
    let per_trial: Vec<Result<Vec<ExperimentRow>>> = (0..cfg.n_trials).into_par_iter().map(|t| run_trial(cfg, &chol, t)).collect();
    let mut rows = Vec::new();
    for r in per_trial {
        rows.extend(r?);
    }
    Ok(rows)
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = pairwise_sum(v) / n;
    if v.len() < 2 {
        return (m, f64::NAN);
    }
    let var = pairwise_sum(&v.iter().map(|x| (x - m).powi(2)).collect::<Vec<_>>()) / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Per-radius means and standard errors. Differences are taken against the
/// smallest radius of each trial, which is the SAA when the grid contains `0`.
pub fn summarize(rows: &[ExperimentRow]) -> Vec<SummaryRow> {
    let mut eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    let Some(&e0) = eps.first() else { return Vec::new() };
    let base = |trial: usize| rows.iter().find(|r| r.trial == trial && r.eps == e0).map(|r| r.out_of_sample_loss);
    eps.iter()
        .map(|&e| {
            let sel: Vec<&ExperimentRow> = rows.iter().filter(|r| r.eps == e).collect();
            let losses: Vec<f64> = sel.iter().map(|r| r.out_of_sample_loss).collect();
            let diffs: Vec<f64> = sel.iter().filter_map(|r| base(r.trial).map(|b| r.out_of_sample_loss - b)).collect();
            let (mean_loss, se_loss) = mean_se(&losses);
            let (mean_diff, se_diff) = mean_se(&diffs);
            let (mean_return, _) = mean_se(&sel.iter().map(|r| r.mean_return).collect::<Vec<_>>());
            let (mean_sharpe, _) = mean_se(&sel.iter().map(|r| r.sharpe).collect::<Vec<_>>());
            SummaryRow { eps: e, mean_loss, se_loss, mean_diff, se_diff, mean_return, mean_sharpe }
        })
        .collect()
}
