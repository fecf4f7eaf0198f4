//! Distributionally robust log-optimal portfolios under the log-return
//! transport cost.

pub mod ctransform;
pub mod experiment;
pub mod solve;

pub use crate::ctransform::toland::{h, h_prime};
pub use ctransform::{portfolio_ctransform, portfolio_gradients, support_size, PortfolioCTransform};
pub use experiment::{default_eps_grid, run_experiment, summarize, ExperimentConfig, ExperimentRow, SummaryRow};
pub use solve::{
    default_start, portfolio_registry, project_feasible, solve_portfolio, solve_best_effort, solve_portfolio_from, solve_saa, DroSolution,
    PortfolioProblem, PortfolioSolver, SolveOptions,
};
