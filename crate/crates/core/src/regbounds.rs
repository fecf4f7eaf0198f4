//! Upper bounds on the worst-case expected loss by variation and Lipschitz
//! regularization terms built from derivatives of the loss.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::domain::Norm;
use crate::error::{Error, Result};
use crate::solvers::numeric::weighted_sum;

/// Per-sample derivative information of a loss `l: R^d -> R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeProfile {
    /// `l(zhat_j)`.
    pub values: Vec<f64>,
    /// `tensor_norms[k-1][j] = ||D^k l(zhat_j)||`; `None` where unavailable.
    pub tensor_norms: Vec<Option<Vec<f64>>>,
    /// `lipschitz[k-1] = lip(D^{k-1} l)`; `None` where unavailable.
    pub lipschitz: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    Variation,
    Lipschitz,
    WassersteinVariation,
    WassersteinLipschitz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WassersteinVariant {
    Variation,
    Lipschitz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegBoundReport {
    pub nominal: f64,
    /// `terms[k-1]` is the order-`k` regularizer.
    pub terms: Vec<f64>,
    pub total: f64,
    pub variant: BoundVariant,
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

impl DerivativeProfile {
    fn check(&self, weights: &[f64], p: u32) -> Result<()> {
        if p == 0 {
            return Err(Error::InvalidInput("p must be at least 1".into()));
        }
        if self.values.len() != weights.len() {
            return Err(Error::InvalidInput(format!("{} loss values for {} weights", self.values.len(), weights.len())));
        }
        for row in self.tensor_norms.iter().flatten() {
            if row.len() != weights.len() || row.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::InvalidInput("tensor norms must be nonnegative, one per sample".into()));
            }
        }
        if self.lipschitz.iter().flatten().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidInput("Lipschitz moduli must be nonnegative".into()));
        }
        Ok(())
    }

    fn norms(&self, k: u32) -> Result<&[f64]> {
        self.tensor_norms
            .get(k as usize - 1)
            .and_then(|o| o.as_deref())
            .ok_or(Error::MissingDerivative { order: k as usize })
    }

    fn lip(&self, k_minus_1: u32) -> Result<f64> {
        self.lipschitz
            .get(k_minus_1 as usize)
            .copied()
            .flatten()
            .ok_or(Error::MissingDerivative { order: k_minus_1 as usize })
    }

    /// Build a profile by central finite differences with step `1e-5 (1 + ||zhat||)`.
    /// Orders 1 and 2 are computed; `higher` supplies orders `3..p-1` and
    /// `lipschitz` the moduli `lip(D^{k-1} l)`, `k = 1..p`.
    pub fn from_finite_differences<F: Fn(&[f64]) -> f64>(
        loss: F,
        atoms: &[Vec<f64>],
        norm: Norm,
        p: u32,
        lipschitz: Vec<Option<f64>>,
        higher: Vec<Option<Vec<f64>>>,
    ) -> Self {
        let values = atoms.iter().map(|z| loss(z)).collect();
        let mut tensor_norms = Vec::new();
        if p >= 2 {
            tensor_norms.push(Some(atoms.iter().map(|z| norm.dual_eval(&fd_gradient(&loss, z, norm))).collect()));
        }
        if p >= 3 {
            tensor_norms.push(Some(atoms.iter().map(|z| hessian_norm(&fd_hessian(&loss, z, norm), norm)).collect()));
        }
        tensor_norms.extend(higher);
        DerivativeProfile { values, tensor_norms, lipschitz }
    }
}

fn fd_step(z: &[f64], norm: Norm) -> f64 {
    1e-5 * (1.0 + norm.eval(z))
}

pub fn fd_gradient<F: Fn(&[f64]) -> f64>(loss: &F, z: &[f64], norm: Norm) -> Vec<f64> {
    let h = fd_step(z, norm);
    let mut zz = z.to_vec();
    (0..z.len())
        .map(|i| {
            zz[i] = z[i] + h;
            let fp = loss(&zz);
            zz[i] = z[i] - h;
            let fm = loss(&zz);
            zz[i] = z[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

pub fn fd_hessian<F: Fn(&[f64]) -> f64>(loss: &F, z: &[f64], norm: Norm) -> DMatrix<f64> {
    let h = fd_step(z, norm);
    let d = z.len();
    let mut out = DMatrix::zeros(d, d);
    let mut zz = z.to_vec();
    let mut at = |di: f64, dj: f64, i: usize, j: usize| {
        zz[i] += di;
        zz[j] += dj;
        let v = loss(&zz);
        zz[i] = z[i];
        zz[j] = z[j];
        v
    };
    for i in 0..d {
        for j in i..d {
            let v = (at(h, h, i, j) - at(h, -h, i, j) - at(-h, h, i, j) + at(-h, -h, i, j)) / (4.0 * h * h);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// `sup { |xi_1' H xi_2| : ||xi_1||, ||xi_2|| <= 1 }` for symmetric `H`.
///
/// Exact for the 2-norm (spectral radius) and the 1-norm (largest entry); for
/// the infinity norm exact by sign enumeration up to `d = 16`, otherwise the
/// upper bound `sum |H_ij|`.
pub fn hessian_norm(h: &DMatrix<f64>, norm: Norm) -> f64 {
    let d = h.nrows();
    match norm {
        Norm::Two => {
            if d == 0 {
                return 0.0;
            }
            let eig = SymmetricEigen::new(h.clone());
            eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        }
        Norm::One => h.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        Norm::Infinity => {
            if d <= 16 {
                let mut best = 0.0f64;
                // xi_1 and -xi_1 give the same value, so fix the first sign.
                for mask in 0u32..(1u32 << d.saturating_sub(1)) {
                    let xi: Vec<f64> = (0..d).map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 }).collect();
                    let hx: f64 = (0..d).map(|r| (0..d).map(|c| h[(r, c)] * xi[c]).sum::<f64>().abs()).sum();
                    best = best.max(hx);
                }
                best
            } else {
                h.iter().map(|v| v.abs()).sum()
            }
        }
    }
}

fn finish(nominal: f64, terms: Vec<f64>, variant: BoundVariant) -> RegBoundReport {
    let total = nominal + terms.iter().sum::<f64>();
    RegBoundReport { nominal, terms, total, variant }
}

fn check_eps(eps: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero { eps >= 0.0 } else { eps > 0.0 };
    if !ok || !eps.is_finite() {
        return Err(Error::InvalidInput(format!("eps must be {}, got {eps}", if allow_zero { "nonnegative" } else { "positive" })));
    }
    Ok(())
}

/// Moment term `E[||D^k l||^{q_k}]^{1/q_k}`, `q_k = p / (p - k)`.
fn moment(weights: &[f64], norms: &[f64], p: u32, k: u32) -> f64 {
    let q = p as f64 / (p - k) as f64;
    let powered: Vec<f64> = norms.iter().map(|v| v.powf(q)).collect();
    weighted_sum(weights, &powered).powf(1.0 / q)
}

/// Variation bound for a transport budget `eps` with `c >= ||z - zhat||^p`:
/// `sum_{k<p} eps^{k/p}/k! E[||D^k l||^{q_k}]^{1/q_k} + eps/p! lip(D^{p-1} l)`.
pub fn variation_bound(profile: &DerivativeProfile, weights: &[f64], p: u32, eps: f64) -> Result<RegBoundReport> {
    profile.check(weights, p)?;
    check_eps(eps, true)?;
    let mut terms = Vec::with_capacity(p as usize);
    for k in 1..p {
        let scale = eps.powf(k as f64 / p as f64) / factorial(k);
        terms.push(scale * moment(weights, profile.norms(k)?, p, k));
    }
    terms.push(eps / factorial(p) * profile.lip(p - 1)?);
    Ok(finish(weighted_sum(weights, &profile.values), terms, BoundVariant::Variation))
}

/// Lipschitz bound for a transport budget `eps`:
/// `sum_{k=1}^{p} eps^{k/p}/k! lip(D^{k-1} l)`.
pub fn lipschitz_bound(profile: &DerivativeProfile, weights: &[f64], p: u32, eps: f64) -> Result<RegBoundReport> {
    profile.check(weights, p)?;
    check_eps(eps, true)?;
    let terms = (1..=p)
        .map(|k| Ok(eps.powf(k as f64 / p as f64) / factorial(k) * profile.lip(k - 1)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(finish(weighted_sum(weights, &profile.values), terms, BoundVariant::Lipschitz))
}

/// Bounds over the `p`-Wasserstein ball of radius `eps` (transport budget `eps^p`).
pub fn wasserstein_bound(
    profile: &DerivativeProfile,
    weights: &[f64],
    p: u32,
    eps: f64,
    variant: WassersteinVariant,
) -> Result<RegBoundReport> {
    profile.check(weights, p)?;
    check_eps(eps, true)?;
    let nominal = weighted_sum(weights, &profile.values);
    match variant {
        WassersteinVariant::Variation => {
            let mut terms = Vec::with_capacity(p as usize);
            for k in 1..p {
                terms.push(eps.powi(k as i32) / factorial(k) * moment(weights, profile.norms(k)?, p, k));
            }
            terms.push(eps.powi(p as i32) / factorial(p) * profile.lip(p - 1)?);
            Ok(finish(nominal, terms, BoundVariant::WassersteinVariation))
        }
        WassersteinVariant::Lipschitz => {
            let terms = (1..=p)
                .map(|k| Ok(eps.powi(k as i32) / factorial(k) * profile.lip(k - 1)?))
                .collect::<Result<Vec<f64>>>()?;
            Ok(finish(nominal, terms, BoundVariant::WassersteinLipschitz))
        }
    }
}
