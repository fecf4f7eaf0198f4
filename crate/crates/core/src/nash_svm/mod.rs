//! Distributionally robust hinge-loss SVM over a feature-label transport ball:
//! primal and dual-light solvers, the family of least favorable distributions,
//! worst-case distributions for a fixed classifier and saddle-point checks.

pub mod data;
pub mod dual_light;
pub mod nash;
pub mod primal;
pub mod saddle;
pub mod worst_case;

pub use data::{gaussian_blobs, synthetic_digits};
pub use dual_light::{solve_dual_light, DualLightSolution};
pub use nash::{nash_family, Alpha, PerturbedAtom, PerturbedDataset, Provenance};
pub use primal::{primal_registry, solve_primal_svm, solve_primal_svm_with, PrimalStrategy, SvmPrimalSolution};
pub use saddle::{minimize_hinge, nash_pipeline, verify_saddle, NashCertificate, NashRun};
pub use worst_case::{worst_case_for_theta, worst_case_value};

use crate::domain::LabeledDataset;
use crate::solvers::numeric::{dot, weighted_sum};

pub(crate) fn hinge(margin: f64) -> f64 {
    (1.0 - margin).max(0.0)
}

/// `sum_j w_j max(0, 1 - y_j <theta, x_j>)`.
pub fn empirical_hinge(data: &LabeledDataset, theta: &[f64]) -> f64 {
    let losses: Vec<f64> = data.features().iter().zip(data.labels()).map(|(x, y)| hinge(y * dot(theta, x))).collect();
    weighted_sum(data.weights(), &losses)
}
