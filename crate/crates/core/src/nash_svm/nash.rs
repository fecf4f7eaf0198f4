//! Least favorable distributions built from a dual-light solution, and the
//! perturbed-dataset type shared with the worst-case construction.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dual_light::DualLightSolution;
use super::hinge;
use crate::domain::{ot_distance, DiscreteDistribution, LabeledDataset, Norm, TransportCost};
use crate::error::{Error, Result};
use crate::solvers::numeric::{dot, pairwise_sum};

const ALPHA_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    WorstCase,
    LeastFavorable { alpha: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedAtom {
    pub source: usize,
    pub mass: f64,
    pub features: Vec<f64>,
    pub label: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedDataset {
    pub atoms: Vec<PerturbedAtom>,
    pub provenance: Provenance,
}

impl PerturbedDataset {
    pub fn total_mass(&self) -> f64 {
        pairwise_sum(&self.atoms.iter().map(|a| a.mass).collect::<Vec<_>>())
    }

    /// `E_Q[max(0, 1 - y <theta, x>)]`.
    pub fn expected_hinge(&self, theta: &[f64]) -> f64 {
        let terms: Vec<f64> = self.atoms.iter().map(|a| a.mass * hinge(a.label * dot(theta, &a.features))).collect();
        pairwise_sum(&terms)
    }

    /// Cost of the coupling that sends each atom back to its source sample;
    /// an upper bound on the optimal transport cost.
    pub fn transport_spend(&self, data: &LabeledDataset, norm: Norm) -> f64 {
        let terms: Vec<f64> = self
            .atoms
            .iter()
            .map(|a| {
                let diff: Vec<f64> = a.features.iter().zip(&data.features()[a.source]).map(|(u, v)| u - v).collect();
                a.mass * norm.eval(&diff)
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// Exact transport cost to the empirical distribution under the
    /// feature-label cost.
    pub fn transport_cost_exact(&self, data: &LabeledDataset, norm: Norm) -> Result<f64> {
        let (v, _) = ot_distance(&self.to_distribution()?, &data.to_distribution(), &TransportCost::FeatureLabel { norm })?;
        Ok(v)
    }

    /// Joint distribution of `(x, y)` with the label as last coordinate.
    pub fn to_distribution(&self) -> Result<DiscreteDistribution> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let mut z = a.features.clone();
                z.push(a.label);
                z
            })
            .collect();
        let total = self.total_mass();
        let masses = self.atoms.iter().map(|a| a.mass / total).collect();
        DiscreteDistribution::from_masses(atoms, masses)
    }

    /// The atoms as a weighted labeled dataset.
    pub fn to_dataset(&self) -> Result<LabeledDataset> {
        let kept: Vec<&PerturbedAtom> = self.atoms.iter().filter(|a| a.mass > 0.0).collect();
        let total = pairwise_sum(&kept.iter().map(|a| a.mass).collect::<Vec<_>>());
        LabeledDataset::new(
            kept.iter().map(|a| a.features.clone()).collect(),
            kept.iter().map(|a| a.label).collect(),
            kept.iter().map(|a| a.mass / total).collect(),
        )
    }

    /// Project every feature vector onto the box `[lo, hi]^k`. When the source
    /// samples lie in the box this never increases the transport spend.
    pub fn clip_features(&mut self, lo: f64, hi: f64) {
        for a in &mut self.atoms {
            a.features.iter_mut().for_each(|v| *v = v.clamp(lo, hi));
        }
    }
}

/// Ways to pick the weights `alpha` of the least favorable family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Alpha {
    /// All budget on one sample, which must be in `J+`.
    Single(usize),
    /// Equal weights on `J+`.
    Uniform,
    Weights(Vec<f64>),
}

impl Alpha {
    pub fn resolve(&self, sol: &DualLightSolution) -> Result<Vec<f64>> {
        let jn = sol.q.len();
        match self {
            Alpha::Single(j) => {
                if *j >= jn {
                    return Err(Error::InvalidAlpha(format!("sample {j} out of range (J = {jn})")));
                }
                let mut a = vec![0.0; jn];
                a[*j] = 1.0;
                Ok(a)
            }
            Alpha::Uniform => {
                if sol.j_plus.is_empty() {
                    return Err(Error::InvalidAlpha("J+ is empty".into()));
                }
                let mut a = vec![0.0; jn];
                let share = 1.0 / sol.j_plus.len() as f64;
                for &j in &sol.j_plus {
                    a[j] = share;
                }
                Ok(a)
            }
            Alpha::Weights(w) => Ok(w.clone()),
        }
    }
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "uniform" {
            return Ok(Alpha::Uniform);
        }
        if let Some(j) = s.strip_prefix("single:") {
            let j = j.parse().map_err(|_| Error::InvalidInput(format!("bad sample index in {s:?}")))?;
            return Ok(Alpha::Single(j));
        }
        Err(Error::InvalidInput(format!("alpha must be uniform or single:<j>, got {s:?}")))
    }
}

/// Least favorable distribution `Q*(alpha)`: every `j` in `J+` keeps mass
/// `w_j - q_j` at its sample and moves `q_j` to `x_j + alpha_j y_j xi / q_j`.
pub fn nash_family(data: &LabeledDataset, sol: &DualLightSolution, alpha: &[f64]) -> Result<PerturbedDataset> {
    let jn = data.len();
    if sol.q.len() != jn || alpha.len() != jn {
        return Err(Error::InvalidAlpha(format!("expected {jn} weights, got {}", alpha.len())));
    }
    if let Some(a) = alpha.iter().find(|a| !(**a >= 0.0) || a.is_infinite()) {
        return Err(Error::InvalidAlpha(format!("weights must be finite and nonnegative, got {a}")));
    }
    let sum = pairwise_sum(alpha);
    if (sum - 1.0).abs() > ALPHA_SUM_TOL {
        return Err(Error::InvalidAlpha(format!("weights sum to {sum}, not 1")));
    }
    if let Some(&j) = sol.j_zero.iter().find(|&&j| alpha[j] != 0.0) {
        return Err(Error::InvalidAlpha(format!("sample {j} has q = 0 but alpha = {}", alpha[j])));
    }
    let mut atoms = Vec::with_capacity(jn + sol.j_plus.len());
    for j in 0..jn {
        let x = &data.features()[j];
        let y = data.labels()[j];
        let w = data.weights()[j];
        let q = sol.q[j];
        if q == 0.0 || alpha[j] == 0.0 {
            atoms.push(PerturbedAtom { source: j, mass: w, features: x.clone(), label: y });
            continue;
        }
        if w - q > 0.0 {
            atoms.push(PerturbedAtom { source: j, mass: w - q, features: x.clone(), label: y });
        }
        let shift = alpha[j] * y / q;
        let moved = x.iter().zip(&sol.xi).map(|(xi, d)| xi + shift * d).collect();
        atoms.push(PerturbedAtom { source: j, mass: q, features: moved, label: y });
    }
    Ok(PerturbedDataset { atoms, provenance: Provenance::LeastFavorable { alpha: alpha.to_vec() } })
}
