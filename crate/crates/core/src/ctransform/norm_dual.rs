//! c-transform for `c(z, zhat) = ||z - zhat||^p` through the envelope of `L`.

use super::CTransformResult;
use crate::domain::Norm;
use crate::envelopes::{envelope, UnivariateLoss};
use crate::error::{Error, Result};
use crate::solvers::numeric::dot;

/// `sup_gamma L(<theta, zhat> + gamma ||theta||_*) - lambda |gamma|^p`, which
/// equals `L_p(<theta, zhat>, lambda / ||theta||_*^p)`.
pub fn ctransform_norm_dual(
    loss: &UnivariateLoss,
    norm: Norm,
    p: u32,
    theta: &[f64],
    lambda: f64,
    zhat: &[f64],
) -> Result<CTransformResult> {
    if theta.len() != zhat.len() {
        return Err(Error::InvalidInput(format!("theta has {} entries, zhat {}", theta.len(), zhat.len())));
    }
    if theta.iter().chain(zhat).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("theta and zhat must be finite".into()));
    }
    let (n, w) = norm.dual_norm_witness(theta);
    let s = dot(theta, zhat);
    if n == 0.0 {
        return Ok(CTransformResult { value: loss.eval(0.0), gamma_star: Some(0.0), z_star: Some(zhat.to_vec()) });
    }
    match envelope(loss, p, s, lambda / n.powi(p as i32)) {
        Ok(env) => {
            let gamma = env.maximizer.map(|x| (x - s) / n);
            let z_star = gamma.map(|g| zhat.iter().zip(&w).map(|(z, wi)| z + g * wi).collect());
            Ok(CTransformResult { value: env.value, gamma_star: gamma, z_star })
        }
        Err(Error::UnboundedEnvelope) => Ok(CTransformResult::infinite()),
        Err(e) => Err(e),
    }
}
