//! Golden-section search and a grid-then-golden maximizer for non-unimodal
//! one-dimensional problems.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Minimize `f` on `[a, b]`. For unimodal `f` the returned point is within
/// `tol` of the minimizer. The endpoints are also compared so monotone
/// objectives return the correct boundary point.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Minimum> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Bracket(format!("invalid bracket [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Bracket(format!("tolerance must be positive, got {tol}")));
    }
    let (mut lo, mut hi) = (a, b);
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while hi - lo > tol && iterations < 400 {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
        iterations += 1;
    }
    let mut best = if fc <= fd { Minimum { x: c, fx: fc, iterations } } else { Minimum { x: d, fx: fd, iterations } };
    for x in [a, b] {
        let fx = f(x);
        if fx < best.fx {
            best = Minimum { x, fx, iterations };
        }
    }
    if best.fx.is_nan() {
        return Err(Error::NonFiniteObjective);
    }
    Ok(best)
}

/// Maximize `f` over sorted grid points, then refine the best cell by golden
/// section. Extra points (kinks) may be mixed into the grid by the caller.
pub fn refine_max_on_grid<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], tol: f64) -> Result<Minimum> {
    if grid.is_empty() {
        return Err(Error::Bracket("empty grid".into()));
    }
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut best = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v > vals[best] || vals[best].is_nan() {
            best = i;
        }
    }
    let mut out = Minimum { x: grid[best], fx: vals[best], iterations: 0 };
    if out.fx == f64::INFINITY {
        return Ok(out);
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    if hi > lo {
        let m = golden_section_min(|x| -f(x), lo, hi, tol)?;
        if -m.fx > out.fx {
            out = Minimum { x: m.x, fx: -m.fx, iterations: m.iterations };
        }
    }
    Ok(out)
}

/// `n` evenly spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
