//! Discrete probability distributions on R^d.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Finitely supported distribution with strictly positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct DiscreteDistribution {
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl TryFrom<RawDistribution> for DiscreteDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        DiscreteDistribution::new(raw.atoms, raw.weights)
    }
}

impl DiscreteDistribution {
    /// Weights must be positive and sum to one within 1e-12; they are not renormalized.
    pub fn new(atoms: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("distribution needs at least one atom".into()));
        }
        if atoms.len() != weights.len() {
            return Err(Error::InvalidInput(format!("{} atoms but {} weights", atoms.len(), weights.len())));
        }
        let d = atoms[0].len();
        if atoms.iter().any(|a| a.len() != d) {
            return Err(Error::InvalidInput("atoms have inconsistent dimensions".into()));
        }
        if atoms.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("atoms must be finite".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInput(format!("weights must be strictly positive, got {w}")));
        }
        let total: f64 = crate::solvers::pairwise_sum(&weights);
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidInput(format!("weights sum to {total:.17}, not 1")));
        }
        Ok(DiscreteDistribution { atoms, weights })
    }

    pub fn uniform(atoms: Vec<Vec<f64>>) -> Result<Self> {
        let n = atoms.len().max(1);
        DiscreteDistribution::new(atoms, vec![1.0 / n as f64; n])
    }

    pub fn dirac(atom: Vec<f64>) -> Self {
        DiscreteDistribution { atoms: vec![atom], weights: vec![1.0] }
    }

    /// Build from possibly zero weights, dropping zero-mass atoms.
    pub fn from_masses(atoms: Vec<Vec<f64>>, masses: Vec<f64>) -> Result<Self> {
        let (a, w): (Vec<_>, Vec<_>) = atoms.into_iter().zip(masses).filter(|(_, m)| *m > 0.0).unzip();
        DiscreteDistribution::new(a, w)
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].len()
    }

    /// `E[f(Z)]` with pairwise summation.
    pub fn expect<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        let vals: Vec<f64> = self.atoms.iter().map(|a| f(a)).collect();
        crate::solvers::weighted_sum(&self.weights, &vals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_weights() {
        assert!(DiscreteDistribution::new(vec![vec![0.0], vec![1.0]], vec![0.5, 0.4]).is_err());
        assert!(DiscreteDistribution::new(vec![vec![0.0], vec![1.0]], vec![1.0, 0.0]).is_err());
        assert!(DiscreteDistribution::new(vec![vec![0.0]], vec![1.0, 0.0]).is_err());
        assert!(DiscreteDistribution::new(vec![vec![0.0], vec![1.0, 2.0]], vec![0.5, 0.5]).is_err());
        assert!(DiscreteDistribution::new(vec![vec![0.0], vec![1.0]], vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let p = DiscreteDistribution::new(vec![vec![0.1, 0.2], vec![3.0, -1.0]], vec![0.25, 0.75]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let q: DiscreteDistribution = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<DiscreteDistribution>(r#"{"atoms":[[1.0]],"weights":[0.5]}"#).is_err());
    }
}
