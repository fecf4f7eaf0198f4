//! Reference oracles shared by the integration tests. They are deliberately
//! naive and independent of the library's own search routines.
#![allow(dead_code)]

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Plain golden-section maximization on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd { (c, fc) } else { (d, fd) }
}

/// Dense grid on `[lo, hi]` plus `extra` points, then golden refinement
/// between the neighbours of the best grid point.
pub fn grid_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize, extra: &[f64]) -> (f64, f64) {
    let mut pts: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    pts.extend(extra.iter().copied().filter(|x| *x >= lo && *x <= hi));
    pts.sort_by(f64::total_cmp);
    let vals: Vec<f64> = pts.iter().map(|&x| f(x)).collect();
    let mut best = 0;
    for i in 1..pts.len() {
        if vals[i] > vals[best] {
            best = i;
        }
    }
    let (mut bx, mut bv) = (pts[best], vals[best]);
    let a = pts[best.saturating_sub(1)];
    let b = pts[(best + 1).min(pts.len() - 1)];
    if b > a {
        let (x, v) = golden_max(&f, a, b);
        if v > bv {
            bx = x;
            bv = v;
        }
    }
    (bx, bv)
}

/// Plain golden-section minimization on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> (f64, f64) {
    let (x, v) = golden_max(|x| -f(x), a, b);
    (x, -v)
}

/// `sup_x L(x) - lambda |s - x|^p` by a wide grid; `extra` should list the
/// kinks and discontinuities of `L`.
pub fn envelope_oracle<L: Fn(f64) -> f64>(loss: L, p: i32, s: f64, lambda: f64, radius: f64, extra: &[f64]) -> f64 {
    let mut pts = extra.to_vec();
    pts.push(s);
    grid_max(|x| loss(x) - lambda * (s - x).abs().powi(p), s - radius, s + radius, 40_001, &pts).1
}

/// `max E_Q[L(theta z)]` over `Q` supported on `grid` with
/// `sum_j sum_g pi_jg |g - zhat_j|^p <= eps` and `sum_g pi_jg = w_j`, as an LP.
pub fn grid_worst_case<L: Fn(f64) -> f64>(
    loss: L,
    theta: f64,
    atoms: &[f64],
    weights: &[f64],
    p: i32,
    eps: f64,
    grid: &[f64],
) -> f64 {
    use drokit::solvers::{lp_solve, LinearProgram, LpStatus, RowSense, Sense};
    let (jn, gn) = (atoms.len(), grid.len());
    let mut obj = Vec::with_capacity(jn * gn);
    for _ in 0..jn {
        obj.extend(grid.iter().map(|g| loss(theta * g)));
    }
    let mut lp = LinearProgram::new(Sense::Maximize, obj);
    for (j, w) in weights.iter().enumerate() {
        let mut row = vec![0.0; jn * gn];
        row[j * gn..(j + 1) * gn].iter_mut().for_each(|r| *r = 1.0);
        lp.add_row(row, RowSense::Eq, *w);
    }
    let mut budget = Vec::with_capacity(jn * gn);
    for a in atoms {
        budget.extend(grid.iter().map(|g| (g - a).abs().powi(p)));
    }
    lp.add_row(budget, RowSense::Le, eps);
    let r = lp_solve(&lp).expect("grid LP");
    assert_eq!(r.status, LpStatus::Optimal);
    r.value
}

/// `h(s) = -1 - log(-s)` below `-1`, `s` on `[-1, 0]`.
fn h_ref(s: f64) -> f64 {
    if s < -1.0 { -1.0 - (-s).ln() } else { s }
}

/// `sup_{gamma < 0} 1 + log(-gamma) + sum_i lambda h(gamma theta_i z_i / lambda)`
/// on a log-spaced grid over `[-1e4, -1e-6]`, refined by golden section.
pub fn portfolio_ctransform_oracle(theta: &[f64], lambda: f64, zhat: &[f64]) -> f64 {
    let f = |gamma: f64| {
        1.0 + (-gamma).ln() + theta.iter().zip(zhat).map(|(t, z)| lambda * h_ref(gamma * t * z / lambda)).sum::<f64>()
    };
    // Search in u = log10(-gamma).
    let (u, v) = grid_max(|u| f(-(10f64.powf(u))), -6.0, 4.0, 20_001, &[]);
    let (_, w) = golden_max(&f, -(10f64.powf(u + 1e-3)), -(10f64.powf(u - 1e-3)));
    v.max(w)
}

/// Uniform random point of the probability simplex.
pub fn random_simplex<R: rand::Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}
