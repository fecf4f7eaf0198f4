//! Nature's best response to a fixed classifier.
//!
//! Moving mass `m` of sample `j` by distance `r` along `-y_j u`, where `u` is
//! a unit vector with `<u, theta> = ||theta||_*`, lowers its margin by
//! `r ||theta||_*`. On an active sample (margin <= 1) the hinge then rises by
//! exactly that amount, so spending the whole budget `eps` on one active
//! sample attains `E[hinge] + eps ||theta||_*`, which is the supremum.

use super::nash::{PerturbedAtom, PerturbedDataset, Provenance};
use super::empirical_hinge;
use crate::domain::{LabeledDataset, Norm};
use crate::error::{Error, Result};
use crate::solvers::numeric::dot;

/// Relative shortfall accepted when no sample is active and the supremum is
/// only approached by sending a vanishing mass arbitrarily far.
const UNATTAINED_SHORTFALL: f64 = 1e-9;

fn check(data: &LabeledDataset, eps: f64, theta: &[f64]) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    if data.is_empty() {
        return Err(Error::InvalidInput("dataset is empty".into()));
    }
    if theta.len() != data.feature_dim() {
        return Err(Error::InvalidInput(format!("theta has {} entries, features {}", theta.len(), data.feature_dim())));
    }
    Ok(())
}

/// `sup_{Q in B_eps} E_Q[hinge(theta)] = E[hinge(theta)] + eps ||theta||_*`.
pub fn worst_case_value(data: &LabeledDataset, norm: Norm, eps: f64, theta: &[f64]) -> Result<f64> {
    check(data, eps, theta)?;
    Ok(empirical_hinge(data, theta) + eps * norm.dual_eval(theta))
}

pub fn worst_case_for_theta(data: &LabeledDataset, norm: Norm, eps: f64, theta: &[f64]) -> Result<PerturbedDataset> {
    check(data, eps, theta)?;
    let mut atoms: Vec<PerturbedAtom> = data
        .features()
        .iter()
        .zip(data.labels())
        .zip(data.weights())
        .enumerate()
        .map(|(j, ((x, y), w))| PerturbedAtom { source: j, mass: *w, features: x.clone(), label: *y })
        .collect();
    let (n, u) = norm.dual_norm_witness(theta);
    if n == 0.0 {
        return Ok(PerturbedDataset { atoms, provenance: Provenance::WorstCase });
    }
    let margins: Vec<f64> = data.features().iter().zip(data.labels()).map(|(x, y)| y * dot(theta, x)).collect();
    let mut j = 0;
    for (k, m) in margins.iter().enumerate() {
        if *m < margins[j] {
            j = k;
        }
    }
    let w = data.weights()[j];
    let y = data.labels()[j];
    let mass = if margins[j] <= 1.0 {
        w
    } else {
        w.min(UNATTAINED_SHORTFALL * eps * n / (margins[j] - 1.0))
    };
    let r = eps / mass;
    let moved: Vec<f64> = data.features()[j].iter().zip(&u).map(|(x, ui)| x - y * r * ui).collect();
    if mass < w {
        atoms[j].mass = w - mass;
        atoms.insert(j + 1, PerturbedAtom { source: j, mass, features: moved, label: y });
    } else {
        atoms[j].features = moved;
    }
    Ok(PerturbedDataset { atoms, provenance: Provenance::WorstCase })
}
