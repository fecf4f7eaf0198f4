//! Shared optimization machinery.

pub mod barrier;
pub mod bisect;
pub mod golden;
pub mod graal;
pub mod lp;
pub mod numeric;
pub mod simplex_proj;
pub mod subgradient;

pub use bisect::bisect_root;
pub use golden::{golden_section_min, refine_max_on_grid, Minimum};
pub use graal::{adaptive_golden_ratio, GraalOptions, GraalReport};
pub use lp::{lp_solve, lp_solve_with, LinearProgram, LpStatus, RowSense, Sense, SolveReport};
pub use numeric::{pairwise_sum, perspective, weighted_sum};
pub use simplex_proj::project_simplex;
pub use subgradient::{projected_subgradient, StepRule, SubgradientReport, SubgradientStatus};
