//! `L_p(s, lambda) = sup_{s'} L(s') - lambda |s - s'|^p`.
//!
//! Closed forms cover hinge (p=1), zero-one (p=1, 2) and quadratic (p=2).
//! Everything else goes through a bracketed grid search refined by golden
//! section, which also serves as the reference oracle in tests.

use serde::{Deserialize, Serialize};

use super::loss::UnivariateLoss;
use crate::error::{Error, Result};
use crate::solvers::golden::{golden_section_min, linspace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeValue {
    pub value: f64,
    /// The attaining `s'`, when the supremum is attained.
    pub maximizer: Option<f64>,
}

const BRACKET_MARGIN: f64 = 1e-9;
const MAX_DOUBLINGS: usize = 60;

fn check_args(p: u32, s: f64, lambda: f64) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidInput("envelope exponent p must be at least 1".into()));
    }
    if !s.is_finite() {
        return Err(Error::InvalidInput(format!("s must be finite, got {s}")));
    }
    if !(lambda >= 0.0) || lambda.is_infinite() {
        return Err(Error::InvalidInput(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    Ok(())
}

/// Closed-form envelope where one is known, numeric otherwise.
/// An infinite supremum is reported as [`Error::UnboundedEnvelope`].
pub fn envelope(loss: &UnivariateLoss, p: u32, s: f64, lambda: f64) -> Result<EnvelopeValue> {
    check_args(p, s, lambda)?;
    if let Some(v) = closed_form(loss, p, s, lambda) {
        return v;
    }
    envelope_numeric(loss, p, s, lambda)
}

/// Envelope value with `+inf` in place of [`Error::UnboundedEnvelope`].
pub fn envelope_value(loss: &UnivariateLoss, p: u32, s: f64, lambda: f64) -> Result<f64> {
    match envelope(loss, p, s, lambda) {
        Ok(v) => Ok(v.value),
        Err(Error::UnboundedEnvelope) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

fn closed_form(loss: &UnivariateLoss, p: u32, s: f64, lambda: f64) -> Option<Result<EnvelopeValue>> {
    let at = |value: f64, x: f64| Some(Ok(EnvelopeValue { value, maximizer: Some(x) }));
    match (loss, p) {
        (UnivariateLoss::NegLog, _) => Some(Err(Error::UnboundedEnvelope)),
        (UnivariateLoss::Hinge, 1) => {
            if lambda >= 1.0 {
                at(loss.eval(s), s)
            } else {
                Some(Err(Error::UnboundedEnvelope))
            }
        }
        (UnivariateLoss::ZeroOne, 1) => {
            let ls = lambda * s;
            let value = (1.0 - ls.max(0.0)).max(0.0);
            let x = if s > 0.0 && ls < 1.0 { 0.0 } else { s };
            at(value, x)
        }
        (UnivariateLoss::ZeroOne, 2) => {
            let r = lambda.sqrt() * s;
            let value = (1.0 - r * r.max(0.0)).max(0.0);
            let x = if s > 0.0 && r * r < 1.0 { 0.0 } else { s };
            at(value, x)
        }
        (UnivariateLoss::Quadratic, 2) => {
            if lambda > 1.0 {
                at(lambda * s * s / (lambda - 1.0), lambda * s / (lambda - 1.0))
            } else if lambda == 1.0 && s == 0.0 {
                at(0.0, 0.0)
            } else {
                Some(Err(Error::UnboundedEnvelope))
            }
        }
        (_, 1) => match loss.lipschitz() {
            // A Lipschitz loss is its own Pasch-Hausdorff envelope once lambda dominates.
            Some(lip) if lambda >= lip => at(loss.eval(s), s),
            _ => None,
        },
        _ => None,
    }
}

/// Grid search plus golden-section refinement. Used as fallback and oracle.
pub fn envelope_numeric(loss: &UnivariateLoss, p: u32, s: f64, lambda: f64) -> Result<EnvelopeValue> {
    check_args(p, s, lambda)?;
    let rate = loss.growth_rate(p);
    if lambda < rate {
        return Err(Error::UnboundedEnvelope);
    }
    if lambda == 0.0 && loss.supremum() == Some(f64::INFINITY) {
        return Err(Error::UnboundedEnvelope);
    }
    let phi = |x: f64| {
        let v = loss.eval(x);
        if v.is_infinite() {
            v
        } else {
            v - lambda * (s - x).abs().powi(p as i32)
        }
    };
    let kinks = loss.kinks();

    // Expand [s - r, s + r] until both ends sit clearly below the interior best.
    let mut r = 1.0;
    let mut doublings = 0;
    let (lo, hi) = loop {
        let (lo, hi) = (s - r, s + r);
        let pts = search_points(lo, hi, s, &kinks, 2001);
        let best_interior = pts[1..pts.len() - 1].iter().map(|&x| phi(x)).fold(f64::NEG_INFINITY, f64::max);
        if phi(lo) < best_interior - BRACKET_MARGIN && phi(hi) < best_interior - BRACKET_MARGIN {
            break (lo, hi);
        }
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::NumericBracketFailure { doublings: MAX_DOUBLINGS });
        }
        r *= 2.0;
    };

    let (x, value) = zoom_max(&phi, lo, hi, s, &kinks)?;
    if !value.is_finite() {
        return Err(Error::UnboundedEnvelope);
    }
    Ok(EnvelopeValue { value, maximizer: Some(x) })
}

/// Grid on `[lo, hi]` plus `s` and the kinks inside it. Grid points that
/// nearly coincide with one of those are dropped: a neighbour one ulp away
/// would otherwise collapse the refinement cell onto a single side.
fn search_points(lo: f64, hi: f64, s: f64, kinks: &[f64], n: usize) -> Vec<f64> {
    let extras: Vec<f64> = std::iter::once(s).chain(kinks.iter().copied()).filter(|x| *x >= lo && *x <= hi).collect();
    let gap = 1e-9 * (hi - lo) / (n - 1) as f64;
    let mut pts: Vec<f64> = linspace(lo, hi, n).into_iter().filter(|x| extras.iter().all(|e| (x - e).abs() > gap)).collect();
    pts.extend(extras);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Multi-level grid zoom followed by golden refinement. Ties prefer the point
/// nearest to `s`.
fn zoom_max<F: Fn(f64) -> f64>(phi: &F, lo: f64, hi: f64, s: f64, kinks: &[f64]) -> Result<(f64, f64)> {
    let mut best_x = s;
    let mut best_v = phi(s);
    let consider = |x: f64, v: f64, bx: &mut f64, bv: &mut f64| {
        if v > *bv || (v == *bv && (x - s).abs() < (*bx - s).abs()) {
            *bx = x;
            *bv = v;
        }
    };
    for &k in kinks {
        if k >= lo && k <= hi {
            consider(k, phi(k), &mut best_x, &mut best_v);
        }
    }
    let (mut a, mut b) = (lo, hi);
    for level in 0..4 {
        let n = if level == 0 { 4001 } else { 401 };
        let pts = search_points(a, b, s, kinks, n);
        let vals: Vec<f64> = pts.iter().map(|&x| phi(x)).collect();
        let mut i_best = 0;
        for i in 0..pts.len() {
            if vals[i] > vals[i_best] || (vals[i] == vals[i_best] && (pts[i] - s).abs() < (pts[i_best] - s).abs()) {
                i_best = i;
            }
        }
        consider(pts[i_best], vals[i_best], &mut best_x, &mut best_v);
        a = pts[i_best.saturating_sub(1)];
        b = pts[(i_best + 1).min(pts.len() - 1)];
        if b - a <= 1e-13 * (1.0 + best_x.abs()) {
            break;
        }
    }
    if b > a {
        let m = golden_section_min(|x| -phi(x), a, b, 1e-14 * (1.0 + a.abs().max(b.abs())))?;
        consider(m.x, -m.fx, &mut best_x, &mut best_v);
    }
    Ok((best_x, best_v))
}

/// Envelope values along an increasing `lambda` schedule; by construction the
/// sequence is nonincreasing and tends to `L(s)`.
pub fn envelope_limit_check(loss: &UnivariateLoss, p: u32, s: f64, schedule: &[f64]) -> Result<Vec<f64>> {
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("lambda schedule must be strictly increasing".into()));
    }
    schedule.iter().map(|&l| envelope_value(loss, p, s, l)).collect()
}
