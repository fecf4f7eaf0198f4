//! Closed-form c-transform of `-log <theta, z>` under the log-metric cost,
//! `sup_{gamma < 0} 1 + log(-gamma) + sum_i lambda h(gamma theta_i zhat_i / lambda)`,
//! found by sorting `u_i = theta_i zhat_i`.

use serde::{Deserialize, Serialize};

use crate::ctransform::toland::{h, h_prime};
use crate::error::{Error, Result};
use crate::solvers::numeric::pairwise_sum;

/// Entries of `theta` at or below this count as zero in `||theta||_0`.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioCTransform {
    pub value: f64,
    /// Maximizing `gamma`; NaN when the value is `+inf`.
    pub gamma_star: f64,
    /// Indices `i` with `gamma* u_i >= -lambda`.
    pub active: Vec<usize>,
    /// Critical index (number of active entries); 0 when the value is `+inf`.
    pub k: usize,
    /// Permutation sorting `u` ascending.
    pub sigma: Vec<usize>,
}

pub fn support_size(theta: &[f64]) -> usize {
    theta.iter().filter(|t| **t > SUPPORT_TOL).count()
}

fn check(theta: &[f64], lambda: f64, zhat: &[f64]) -> Result<()> {
    if theta.is_empty() || theta.len() != zhat.len() {
        return Err(Error::InvalidInput(format!("theta has {} entries, zhat {}", theta.len(), zhat.len())));
    }
    if let Some(z) = zhat.iter().find(|z| !(**z > 0.0) || z.is_infinite()) {
        return Err(Error::Domain(format!("returns must be positive and finite, got {z}")));
    }
    if theta.iter().any(|t| !(*t >= 0.0) || t.is_infinite()) {
        return Err(Error::InvalidInput("theta must be nonnegative".into()));
    }
    if support_size(theta) == 0 {
        return Err(Error::InvalidInput("theta has empty support".into()));
    }
    if !(lambda >= 0.0) || lambda.is_infinite() {
        return Err(Error::InvalidInput(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    Ok(())
}

pub fn portfolio_ctransform(theta: &[f64], lambda: f64, zhat: &[f64]) -> Result<PortfolioCTransform> {
    check(theta, lambda, zhat)?;
    let d = theta.len();
    let u: Vec<f64> = theta.iter().zip(zhat).map(|(t, z)| t * z).collect();
    let mut sigma: Vec<usize> = (0..d).collect();
    sigma.sort_by(|&a, &b| u[a].total_cmp(&u[b]).then(a.cmp(&b)));
    if lambda < 1.0 / support_size(theta) as f64 {
        return Ok(PortfolioCTransform { value: f64::INFINITY, gamma_star: f64::NAN, active: Vec::new(), k: 0, sigma });
    }
    let mut k = 0;
    let mut prefix = 0.0;
    let mut k_sum = 0.0;
    for i in 1..=d {
        let ui = u[sigma[i - 1]];
        prefix += ui;
        if (1.0 - (d - i) as f64 * lambda) * ui <= lambda * prefix {
            k = i;
            k_sum = prefix;
        }
    }
    if k == 0 || !(k_sum > 0.0) {
        return Err(Error::Domain("no critical index with positive mass".into()));
    }
    let gamma = ((d - k) as f64 * lambda - 1.0) / k_sum;
    let terms: Vec<f64> = u.iter().map(|ui| lambda * h(gamma * ui / lambda)).collect();
    let value = 1.0 + (-gamma).ln() + pairwise_sum(&terms);
    let mut active: Vec<usize> = sigma[..k].to_vec();
    active.sort_unstable();
    Ok(PortfolioCTransform { value, gamma_star: gamma, active, k, sigma })
}

/// Gradients of `lambda eps + l_c(theta, lambda, zhat)` in `theta` and `lambda`.
pub fn portfolio_gradients(theta: &[f64], lambda: f64, zhat: &[f64], eps: f64) -> Result<(Vec<f64>, f64)> {
    let ct = portfolio_ctransform(theta, lambda, zhat)?;
    if ct.value.is_infinite() {
        return Err(Error::InfiniteRegion { lambda, threshold: 1.0 / support_size(theta) as f64 });
    }
    Ok(gradients_at(theta, lambda, zhat, eps, ct.gamma_star))
}

pub(crate) fn gradients_at(theta: &[f64], lambda: f64, zhat: &[f64], eps: f64, gamma: f64) -> (Vec<f64>, f64) {
    let mut grad_theta = Vec::with_capacity(theta.len());
    let mut hs = Vec::with_capacity(theta.len());
    let mut lin = Vec::with_capacity(theta.len());
    for (t, z) in theta.iter().zip(zhat) {
        let s = gamma * t * z / lambda;
        let hp = h_prime(s);
        grad_theta.push(gamma * z * hp);
        hs.push(h(s));
        lin.push(gamma * t * z * hp);
    }
    let grad_lambda = eps + pairwise_sum(&hs) - pairwise_sum(&lin) / lambda;
    (grad_theta, grad_lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_asset() {
        let c = portfolio_ctransform(&[1.0], 2.0, &[1.0]).unwrap();
        assert_eq!(c.k, 1);
        assert_eq!(c.gamma_star, -1.0);
        assert!(c.value.abs() < 1e-15);
        let (_, gl) = portfolio_gradients(&[1.0], 2.0, &[1.0], 0.0).unwrap();
        assert!(gl.abs() < 1e-15);
    }

    #[test]
    fn below_threshold_is_infinite() {
        let c = portfolio_ctransform(&[0.5, 0.5], 0.4, &[1.0, 1.2]).unwrap();
        assert_eq!(c.value, f64::INFINITY);
        assert!(matches!(portfolio_gradients(&[0.5, 0.5], 0.4, &[1.0, 1.2], 0.1), Err(Error::InfiniteRegion { .. })));
    }

    #[test]
    fn large_lambda_recovers_nominal_loss() {
        let theta = [0.2, 0.3, 0.5];
        let z = [1.1, 0.9, 1.3];
        let c = portfolio_ctransform(&theta, 1.5, &z).unwrap();
        let nominal = -(0.2 * 1.1 + 0.3 * 0.9 + 0.5 * 1.3f64).ln();
        assert!((c.value - nominal).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonpositive_returns() {
        assert!(matches!(portfolio_ctransform(&[1.0], 2.0, &[0.0]), Err(Error::Domain(_))));
    }
}
