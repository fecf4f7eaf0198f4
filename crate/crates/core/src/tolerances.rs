//! Central record of numerical tolerances.
//!
//! Every solver in the crate reads its defaults from [`Tolerances`]. The
//! `DROKIT_TOL` environment variable overrides individual fields with a
//! comma-separated `key=value` list, e.g. `DROKIT_TOL="gap=1e-7,golden=1e-12"`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ENV_VAR: &str = "DROKIT_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Primal feasibility of LP solutions and transport budgets.
    pub feasibility: f64,
    /// Duality / complementary-slackness gaps.
    pub gap: f64,
    /// Interval width at which golden-section search stops.
    pub golden: f64,
    /// Pivot threshold of the simplex codes.
    pub pivot: f64,
    /// Probability vectors must sum to one within this tolerance.
    pub normalization: f64,
    /// Entries of theta below this count as zero in ||theta||_0.
    pub support: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feasibility: 1e-9,
            gap: 1e-8,
            golden: 1e-10,
            pivot: 1e-12,
            normalization: 1e-12,
            support: 1e-12,
        }
    }
}

impl Tolerances {
    /// Defaults with `DROKIT_TOL` overrides applied.
    pub fn from_env() -> Result<Self> {
        match std::env::var(ENV_VAR) {
            Ok(spec) => Self::default().with_overrides(&spec),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("{ENV_VAR}: expected key=value, got {item:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("{ENV_VAR}: bad number in {item:?}")))?;
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidInput(format!("{ENV_VAR}: {key} must be positive")));
            }
            let slot = match key.trim() {
                "feasibility" => &mut self.feasibility,
                "gap" => &mut self.gap,
                "golden" => &mut self.golden,
                "pivot" => &mut self.pivot,
                "normalization" => &mut self.normalization,
                "support" => &mut self.support,
                other => return Err(Error::InvalidInput(format!("{ENV_VAR}: unknown key {other:?}"))),
            };
            *slot = value;
        }
        Ok(self)
    }
}
