//! Small numeric helpers shared across modules.

/// Pairwise (tree) summation; the result does not depend on thread scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Pairwise sum of `w_i * v_i`. Infinite terms with zero weight count as zero.
pub fn weighted_sum(w: &[f64], v: &[f64]) -> f64 {
    let terms: Vec<f64> = w.iter().zip(v).map(|(&a, &b)| if a == 0.0 { 0.0 } else { a * b }).collect();
    pairwise_sum(&terms)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Perspective `λ f(x/λ)` for `λ > 0`, and the recession function at `λ = 0`.
///
/// The recession function of a conjugate is the support function of the
/// original function's domain, which is what callers pass as `recession`.
pub fn perspective<F, R>(lambda: f64, x: &[f64], f: F, recession: R) -> f64
where
    F: Fn(&[f64]) -> f64,
    R: Fn(&[f64]) -> f64,
{
    if lambda > 0.0 {
        let scaled: Vec<f64> = x.iter().map(|v| v / lambda).collect();
        let v = f(&scaled);
        if v.is_infinite() {
            v
        } else {
            lambda * v
        }
    } else {
        recession(x)
    }
}

/// Relative distance `|a-b| / max(1, |a|, |b|)`; equal infinities give 0.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}
