//! Univariate losses `L: R -> (-inf, +inf]` and the metadata the envelope and
//! c-transform code needs about them.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::Error;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied differentiable loss.
#[derive(Clone)]
pub struct SmoothLoss {
    pub name: String,
    pub eval: ScalarFn,
    pub derivative: ScalarFn,
    /// Lipschitz modulus `M` of the derivative.
    pub smoothness: f64,
    /// Quadratic growth rate `G = limsup L(s) / s^2`.
    pub quadratic_growth: f64,
    /// Lipschitz modulus of the loss itself, if finite.
    pub lipschitz: Option<f64>,
    /// Fenchel conjugate and its (closed) domain, if known.
    pub conjugate: Option<(ScalarFn, (f64, f64))>,
    /// `sup_s L(s)`, if known.
    pub supremum: Option<f64>,
}

impl SmoothLoss {
    /// `log(1 + exp(-s))`.
    pub fn logistic() -> Self {
        SmoothLoss {
            name: "logistic".into(),
            eval: Arc::new(|s: f64| if s > 0.0 { (-s).exp().ln_1p() } else { -s + s.exp().ln_1p() }),
            derivative: Arc::new(|s: f64| -1.0 / (1.0 + s.exp())),
            smoothness: 0.25,
            quadratic_growth: 0.0,
            lipschitz: Some(1.0),
            conjugate: Some((
                Arc::new(|g: f64| {
                    // Binary entropy form on [-1, 0].
                    let a = -g;
                    let xlogx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
                    if !(0.0..=1.0).contains(&a) {
                        f64::INFINITY
                    } else {
                        xlogx(a) + xlogx(1.0 - a)
                    }
                }),
                (-1.0, 0.0),
            )),
            supremum: Some(f64::INFINITY),
        }
    }

    /// `a s^2 + b s + c` with `a >= 0`.
    pub fn quadratic_poly(a: f64, b: f64, c: f64) -> Self {
        SmoothLoss {
            name: format!("quadratic({a},{b},{c})"),
            eval: Arc::new(move |s| a * s * s + b * s + c),
            derivative: Arc::new(move |s| 2.0 * a * s + b),
            smoothness: 2.0 * a,
            quadratic_growth: a,
            lipschitz: if a == 0.0 { Some(b.abs()) } else { None },
            conjugate: None,
            supremum: if a == 0.0 && b == 0.0 { Some(c) } else { Some(f64::INFINITY) },
        }
    }
}

impl fmt::Debug for SmoothLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothLoss")
            .field("name", &self.name)
            .field("smoothness", &self.smoothness)
            .field("quadratic_growth", &self.quadratic_growth)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum UnivariateLoss {
    /// `max(0, 1 - s)`
    Hinge,
    /// `1` if `s <= 0`, else `0`
    ZeroOne,
    /// `s^2`
    Quadratic,
    /// `-log s` for `s > 0`, `+inf` otherwise
    NegLog,
    SmoothCustom(SmoothLoss),
}

impl UnivariateLoss {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            UnivariateLoss::Hinge => (1.0 - s).max(0.0),
            UnivariateLoss::ZeroOne => {
                if s <= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            UnivariateLoss::Quadratic => s * s,
            UnivariateLoss::NegLog => {
                if s > 0.0 {
                    -s.ln()
                } else {
                    f64::INFINITY
                }
            }
            UnivariateLoss::SmoothCustom(l) => (l.eval)(s),
        }
    }

    /// Derivative where it exists (right derivative at kinks).
    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            UnivariateLoss::Hinge => {
                if s < 1.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            UnivariateLoss::ZeroOne => 0.0,
            UnivariateLoss::Quadratic => 2.0 * s,
            UnivariateLoss::NegLog => {
                if s > 0.0 {
                    -1.0 / s
                } else {
                    f64::NAN
                }
            }
            UnivariateLoss::SmoothCustom(l) => (l.derivative)(s),
        }
    }

    /// `limsup_{|s|->inf} L(s) / |s|^p`: the envelope with exponent `p` is
    /// `+inf` for every `lambda` below this rate.
    pub fn growth_rate(&self, p: u32) -> f64 {
        match (self, p) {
            (UnivariateLoss::Hinge, 1) => 1.0,
            (UnivariateLoss::Hinge, _) => 0.0,
            (UnivariateLoss::ZeroOne, _) => 0.0,
            (UnivariateLoss::Quadratic, 1) => f64::INFINITY,
            (UnivariateLoss::Quadratic, 2) => 1.0,
            (UnivariateLoss::Quadratic, _) => 0.0,
            (UnivariateLoss::NegLog, _) => f64::INFINITY,
            (UnivariateLoss::SmoothCustom(l), 1) => l.lipschitz.unwrap_or(f64::INFINITY),
            (UnivariateLoss::SmoothCustom(l), 2) => l.quadratic_growth,
            (UnivariateLoss::SmoothCustom(l), _) => {
                if l.quadratic_growth.is_finite() {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `sup_s L(s)` when known.
    pub fn supremum(&self) -> Option<f64> {
        match self {
            UnivariateLoss::ZeroOne => Some(1.0),
            UnivariateLoss::SmoothCustom(l) => l.supremum,
            _ => Some(f64::INFINITY),
        }
    }

    /// Points where `L` is not differentiable; added to numeric search grids.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            UnivariateLoss::Hinge => vec![1.0],
            UnivariateLoss::ZeroOne => vec![0.0],
            _ => Vec::new(),
        }
    }

    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            UnivariateLoss::Hinge => Some(1.0),
            UnivariateLoss::SmoothCustom(l) => l.lipschitz,
            _ => None,
        }
    }

    /// `(M, G)` for differentiable losses with Lipschitz derivative.
    pub fn smoothness(&self) -> Option<(f64, f64)> {
        match self {
            UnivariateLoss::Quadratic => Some((2.0, 1.0)),
            UnivariateLoss::SmoothCustom(l) => Some((l.smoothness, l.quadratic_growth)),
            _ => None,
        }
    }

    /// Fenchel conjugate `L*(g) = sup_s g s - L(s)` with its domain.
    pub fn conjugate(&self) -> Option<(ScalarFn, (f64, f64))> {
        match self {
            UnivariateLoss::Hinge => Some((
                Arc::new(|g: f64| if (-1.0..=0.0).contains(&g) { g } else { f64::INFINITY }),
                (-1.0, 0.0),
            )),
            UnivariateLoss::Quadratic => Some((Arc::new(|g: f64| g * g / 4.0), (f64::NEG_INFINITY, f64::INFINITY))),
            UnivariateLoss::NegLog => Some((
                Arc::new(|g: f64| if g < 0.0 { -1.0 - (-g).ln() } else { f64::INFINITY }),
                (f64::NEG_INFINITY, 0.0),
            )),
            UnivariateLoss::ZeroOne => None,
            UnivariateLoss::SmoothCustom(l) => l.conjugate.clone(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            UnivariateLoss::Hinge => "hinge".into(),
            UnivariateLoss::ZeroOne => "zero-one".into(),
            UnivariateLoss::Quadratic => "quadratic".into(),
            UnivariateLoss::NegLog => "neg-log".into(),
            UnivariateLoss::SmoothCustom(l) => l.name.clone(),
        }
    }
}

impl FromStr for UnivariateLoss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "hinge" => Ok(UnivariateLoss::Hinge),
            "zero-one" | "01" => Ok(UnivariateLoss::ZeroOne),
            "quadratic" | "square" => Ok(UnivariateLoss::Quadratic),
            "neg-log" | "log" => Ok(UnivariateLoss::NegLog),
            "logistic" => Ok(UnivariateLoss::SmoothCustom(SmoothLoss::logistic())),
            other => Err(Error::InvalidInput(format!("unknown loss {other:?}"))),
        }
    }
}
