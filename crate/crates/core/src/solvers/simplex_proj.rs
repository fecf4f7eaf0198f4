//! Euclidean projection onto the probability simplex.

/// Sort-based O(d log d) projection of `v` onto `{x >= 0, sum x = 1}`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "cannot project onto an empty simplex");
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            tau = t;
        }
    }
    let mut x: Vec<f64> = v.iter().map(|&vi| (vi - tau).max(0.0)).collect();
    // Remove the last ulp of drift so sums are exactly one up to rounding.
    let s: f64 = x.iter().sum();
    if s > 0.0 && (s - 1.0).abs() > 0.0 {
        x.iter_mut().for_each(|xi| *xi /= s);
    }
    x
}
