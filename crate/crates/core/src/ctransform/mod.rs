//! c-transforms `l_c(theta, lambda, zhat) = sup_z L(<theta, z>) - lambda c(z, zhat)`
//! and the one-dimensional dual of the worst-case expected loss.

pub mod dro_value;
pub mod norm_dual;
pub mod quadratic;
pub mod toland;

use serde::{Deserialize, Serialize};

pub use dro_value::{dro_value_via_envelope, DroValue};
pub use norm_dual::ctransform_norm_dual;
pub use quadratic::{efficient_sgd_region, quadratic_ctransform, quadratic_lambda_interval, LambdaInterval};
pub use toland::{ctransform_toland, log_metric_conjugate, norm_power_conjugate, CostConjugate, LossConjugate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CTransformResult {
    pub value: f64,
    /// Scalar dual maximizer.
    pub gamma_star: Option<f64>,
    /// A maximizing `z`, when it can be reconstructed.
    pub z_star: Option<Vec<f64>>,
}

impl CTransformResult {
    pub fn infinite() -> Self {
        CTransformResult { value: f64::INFINITY, gamma_star: None, z_star: None }
    }
}
