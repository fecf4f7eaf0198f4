//! Smooth convex losses under the squared-norm cost `||z - zhat||^2`.

use serde::{Deserialize, Serialize};

use super::norm_dual::ctransform_norm_dual;
use super::CTransformResult;
use crate::domain::Norm;
use crate::envelopes::UnivariateLoss;
use crate::error::{Error, Result};
use crate::solvers::bisect_root;
use crate::solvers::numeric::dot;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaInterval {
    pub lower: f64,
    pub upper: f64,
}

impl LambdaInterval {
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lower - tol && x <= self.upper + tol
    }
}

/// Interval containing a minimizer of `lambda eps + E[l_c(theta, lambda, Z)]`
/// (lambda in c-transform units):
/// `[sqrt(E ||theta||_*^2 / (4 eps)), sqrt(E ||theta||_*^2 / eps) + M ||theta||_*^2 / 2]`
/// with `E = E[|L'(<theta, Z>)|^2]`.
pub fn quadratic_lambda_interval(theta: &[f64], norm: Norm, eps: f64, smoothness: f64, second_moment: f64) -> Result<LambdaInterval> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    if !(smoothness >= 0.0) || !(second_moment >= 0.0) {
        return Err(Error::InvalidInput("smoothness and second moment must be nonnegative".into()));
    }
    let n2 = norm.dual_eval(theta).powi(2);
    Ok(LambdaInterval { lower: (second_moment * n2 / (4.0 * eps)).sqrt(), upper: (second_moment * n2 / eps).sqrt() + smoothness * n2 / 2.0 })
}

/// True when `0 < eps < L_lower / (R M)^2`; in that region the dual minimizer
/// exceeds `M ||theta||_*^2 / 2` and every c-transform is strongly concave.
pub fn efficient_sgd_region(eps: f64, l_lower: f64, radius: f64, smoothness: f64) -> bool {
    let rm = radius * smoothness;
    eps > 0.0 && (rm == 0.0 || eps < l_lower / (rm * rm))
}

/// c-transform of a convex `M`-smooth loss with quadratic growth `G` under
/// the squared-norm cost.
///
/// `+inf` when `lambda < G ||theta||_*^2`; bisection on the derivative of the
/// strongly concave scalar problem when `lambda > M ||theta||_*^2 / 2`; the
/// generic envelope search in between.
pub fn quadratic_ctransform(loss: &UnivariateLoss, norm: Norm, theta: &[f64], lambda: f64, zhat: &[f64]) -> Result<CTransformResult> {
    let (m, g) = loss
        .smoothness()
        .ok_or_else(|| Error::InvalidInput(format!("loss {} has no smoothness metadata", loss.name())))?;
    if theta.len() != zhat.len() {
        return Err(Error::InvalidInput("theta and zhat differ in length".into()));
    }
    let (n, w) = norm.dual_norm_witness(theta);
    let s0 = dot(theta, zhat);
    if n == 0.0 {
        return Ok(CTransformResult { value: loss.eval(0.0), gamma_star: Some(0.0), z_star: Some(zhat.to_vec()) });
    }
    let n2 = n * n;
    if lambda < g * n2 {
        return Ok(CTransformResult::infinite());
    }
    if lambda <= m * n2 / 2.0 {
        return ctransform_norm_dual(loss, norm, 2, theta, lambda, zhat);
    }
    let dphi = |gamma: f64| n * loss.derivative(s0 + gamma * n) - 2.0 * lambda * gamma;
    let d0 = dphi(0.0);
    let gamma = if d0 == 0.0 {
        0.0
    } else {
        let dir = d0.signum();
        let mut b = 1.0;
        let mut found = false;
        for _ in 0..200 {
            if dphi(dir * b).signum() != d0.signum() {
                found = true;
                break;
            }
            b *= 2.0;
        }
        if !found {
            return Err(Error::NumericBracketFailure { doublings: 200 });
        }
        let (a, c) = if dir > 0.0 { (0.0, b) } else { (-b, 0.0) };
        bisect_root(dphi, a, c, 1e-15 * b.max(1.0))?
    };
    let bound = n / (2.0 * lambda) * loss.derivative(s0).abs();
    if gamma.abs() < bound * (1.0 - 1e-9) - 1e-14 {
        return Err(Error::InvalidInput(format!("maximizer {gamma} violates the lower bound {bound}; is the loss convex?")));
    }
    let value = loss.eval(s0 + gamma * n) - lambda * gamma * gamma;
    let z_star = zhat.iter().zip(&w).map(|(z, wi)| z + gamma * wi).collect();
    Ok(CTransformResult { value, gamma_star: Some(gamma), z_star: Some(z_star) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_examples() {
        let i = quadratic_lambda_interval(&[1.0], Norm::Two, 1.0, 0.0, 4.0).unwrap();
        assert_eq!((i.lower, i.upper), (1.0, 2.0));
        let i = quadratic_lambda_interval(&[1.0], Norm::Two, 1.0, 2.0, 0.0).unwrap();
        assert_eq!((i.lower, i.upper), (0.0, 1.0));
    }

    #[test]
    fn quadratic_examples() {
        let q = UnivariateLoss::Quadratic;
        assert_eq!(quadratic_ctransform(&q, Norm::Two, &[1.0], 0.5, &[1.0]).unwrap().value, f64::INFINITY);
        let r = quadratic_ctransform(&q, Norm::Two, &[1.0], 2.0, &[1.0]).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.gamma_star.unwrap().abs() >= 0.5);
        let r = quadratic_ctransform(&q, Norm::Two, &[1.0], 2.0, &[0.0]).unwrap();
        assert_eq!(r.gamma_star, Some(0.0));
    }
}
