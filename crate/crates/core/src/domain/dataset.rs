//! Labeled binary-classification datasets.

use serde::{Deserialize, Serialize};

use super::distribution::DiscreteDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    features: Vec<Vec<f64>>,
    labels: Vec<f64>,
    weights: Vec<f64>,
}

impl LabeledDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::InvalidInput(format!("{} feature rows but {} labels", features.len(), labels.len())));
        }
        if let Some(y) = labels.iter().find(|y| **y != 1.0 && **y != -1.0) {
            return Err(Error::InvalidInput(format!("labels must be -1 or +1, got {y}")));
        }
        // Validates weights, lengths and feature dimensions in one place.
        DiscreteDistribution::new(features.clone(), weights.clone())?;
        Ok(LabeledDataset { features, labels, weights })
    }

    pub fn uniform(features: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        let n = features.len().max(1);
        LabeledDataset::new(features, labels, vec![1.0 / n as f64; n])
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.features[0].len()
    }

    /// The joint distribution of `(x, y)` with the label as last coordinate.
    pub fn to_distribution(&self) -> DiscreteDistribution {
        let atoms = self
            .features
            .iter()
            .zip(&self.labels)
            .map(|(x, y)| {
                let mut z = x.clone();
                z.push(*y);
                z
            })
            .collect();
        DiscreteDistribution::new(atoms, self.weights.clone()).expect("validated at construction")
    }
}
