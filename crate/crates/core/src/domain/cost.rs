//! Transport cost functions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::norm::Norm;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransportCost {
    /// `||z - zhat||^p`.
    NormPower { norm: Norm, p: u32 },
    /// `||x - xhat||` between equal labels, `+inf` across labels. The label is
    /// the last coordinate of each atom.
    FeatureLabel { norm: Norm },
    /// `sum_i |log(z_i / zhat_i)|` on strictly positive vectors.
    LogMetric,
}

impl TransportCost {
    pub fn norm_power(norm: Norm, p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidInput("cost exponent p must be at least 1".into()));
        }
        Ok(TransportCost::NormPower { norm, p })
    }

    pub fn eval(&self, z: &[f64], zhat: &[f64]) -> Result<f64> {
        if z.len() != zhat.len() {
            return Err(Error::InvalidInput(format!("dimension mismatch {} vs {}", z.len(), zhat.len())));
        }
        match *self {
            TransportCost::NormPower { norm, p } => {
                let diff: Vec<f64> = z.iter().zip(zhat).map(|(a, b)| a - b).collect();
                Ok(norm.eval(&diff).powi(p as i32))
            }
            TransportCost::FeatureLabel { norm } => {
                let d = z.len();
                if d == 0 {
                    return Err(Error::InvalidInput("feature-label cost needs a label coordinate".into()));
                }
                if z[d - 1] != zhat[d - 1] {
                    return Ok(f64::INFINITY);
                }
                let diff: Vec<f64> = z[..d - 1].iter().zip(&zhat[..d - 1]).map(|(a, b)| a - b).collect();
                Ok(norm.eval(&diff))
            }
            TransportCost::LogMetric => {
                if z.iter().chain(zhat).any(|v| !(*v > 0.0)) {
                    return Err(Error::Domain("log-metric cost needs strictly positive vectors".into()));
                }
                Ok(z.iter().zip(zhat).map(|(a, b)| (a / b).ln().abs()).sum())
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        true
    }
}

impl fmt::Display for TransportCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransportCost::NormPower { norm, p: 1 } => write!(f, "norm{norm}"),
            TransportCost::NormPower { norm, p } => write!(f, "norm{norm}^{p}"),
            TransportCost::FeatureLabel { norm } => write!(f, "label-norm{norm}"),
            TransportCost::LogMetric => f.write_str("log"),
        }
    }
}

impl FromStr for TransportCost {
    type Err = Error;

    /// Accepts `norm1`, `norm2^2`, `norminf`, `label-norm2`, `log`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "log" || s == "log-metric" {
            return Ok(TransportCost::LogMetric);
        }
        if let Some(rest) = s.strip_prefix("label-norm") {
            return Ok(TransportCost::FeatureLabel { norm: rest.parse()? });
        }
        if let Some(rest) = s.strip_prefix("norm") {
            let (n, p) = match rest.split_once('^') {
                Some((n, p)) => (n, p.parse::<u32>().map_err(|_| Error::InvalidInput(format!("bad exponent in {s:?}")))?),
                None => (rest, 1),
            };
            return TransportCost::norm_power(n.parse()?, p);
        }
        Err(Error::InvalidInput(format!("unknown cost {s:?}")))
    }
}
