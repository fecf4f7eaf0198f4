//! The three vector norms used throughout the crate and their duals.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    One,
    Two,
    Infinity,
}

impl Norm {
    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Norm::One => x.iter().map(|v| v.abs()).sum(),
            Norm::Two => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Norm::Infinity => x.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub fn dual(self) -> Norm {
        match self {
            Norm::One => Norm::Infinity,
            Norm::Two => Norm::Two,
            Norm::Infinity => Norm::One,
        }
    }

    pub fn dual_eval(self, y: &[f64]) -> f64 {
        self.dual().eval(y)
    }

    /// Dual norm of `x` together with a unit-ball point `w` attaining it:
    /// `self.eval(w) <= 1` and `<w, x> = dual_eval(x)`.
    pub fn dual_norm_witness(self, x: &[f64]) -> (f64, Vec<f64>) {
        let value = self.dual_eval(x);
        let mut w = vec![0.0; x.len()];
        if value == 0.0 {
            return (0.0, w);
        }
        match self {
            Norm::Two => {
                for (wi, xi) in w.iter_mut().zip(x) {
                    *wi = xi / value;
                }
            }
            Norm::One => {
                let mut k = 0;
                for (i, xi) in x.iter().enumerate() {
                    if xi.abs() > x[k].abs() {
                        k = i;
                    }
                }
                w[k] = x[k].signum();
            }
            Norm::Infinity => {
                for (wi, xi) in w.iter_mut().zip(x) {
                    *wi = if *xi > 0.0 {
                        1.0
                    } else if *xi < 0.0 {
                        -1.0
                    } else {
                        0.0
                    };
                }
            }
        }
        (value, w)
    }

    /// Short name as accepted by the CLI.
    pub fn name(self) -> &'static str {
        match self {
            Norm::One => "1",
            Norm::Two => "2",
            Norm::Infinity => "inf",
        }
    }
}

/// Free-function form of [`Norm::dual_norm_witness`].
pub fn dual_norm_witness(norm: Norm, x: &[f64]) -> (f64, Vec<f64>) {
    norm.dual_norm_witness(x)
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "one" | "l1" => Ok(Norm::One),
            "2" | "two" | "l2" => Ok(Norm::Two),
            "inf" | "infinity" | "linf" => Ok(Norm::Infinity),
            other => Err(Error::InvalidInput(format!("unknown norm {other:?}"))),
        }
    }
}
