//! Exact optimal transport between small discrete distributions.
//!
//! Transportation simplex on the dense cost matrix: north-west-corner start,
//! u-v potentials on the spanning tree of basic cells, cycle pivoting. Cells
//! with infinite cost carry the pair cost `(1, 0)` and finite cells `(0, c)`,
//! compared lexicographically, so forbidden cells are only used when no finite
//! plan exists.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::cost::TransportCost;
use super::distribution::DiscreteDistribution;
use crate::error::{Error, Result};

pub const MAX_ATOMS: usize = 200;
const DEGENERATE_SWITCH: usize = 500;
/// Mass this small on a forbidden cell is treated as rounding noise.
const FORBIDDEN_MASS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Move {
    pub source: usize,
    pub target: usize,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingPlan {
    pub moves: Vec<Move>,
    pub total_cost: f64,
}

impl CouplingPlan {
    /// Row and column sums of the plan.
    pub fn marginals(&self, m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut r = vec![0.0; m];
        let mut c = vec![0.0; n];
        for mv in &self.moves {
            r[mv.source] += mv.mass;
            c[mv.target] += mv.mass;
        }
        (r, c)
    }
}

/// Exact `min_pi sum pi_ij c(p_i, q_j)` over couplings of `p` and `q`.
pub fn ot_distance(p: &DiscreteDistribution, q: &DiscreteDistribution, cost: &TransportCost) -> Result<(f64, CouplingPlan)> {
    if p.len() > MAX_ATOMS || q.len() > MAX_ATOMS {
        return Err(Error::InvalidInput(format!("exact transport supports at most {MAX_ATOMS} atoms per side")));
    }
    if p.dim() != q.dim() {
        return Err(Error::InvalidInput(format!("dimension mismatch {} vs {}", p.dim(), q.dim())));
    }
    let mut c = Vec::with_capacity(p.len());
    for a in p.atoms() {
        let row: Result<Vec<f64>> = q.atoms().iter().map(|b| cost.eval(a, b)).collect();
        c.push(row?);
    }
    transport_matrix(p.weights(), q.weights(), &c)
}

/// Transportation simplex on an explicit cost matrix (`+inf` allowed).
pub fn transport_matrix(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> Result<(f64, CouplingPlan)> {
    let m = supply.len();
    let n = demand.len();
    if m == 0 || n == 0 || cost.len() != m || cost.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("cost matrix shape does not match marginals".into()));
    }
    if cost.iter().flatten().any(|c| c.is_nan() || *c < 0.0) {
        return Err(Error::InvalidInput("costs must be nonnegative".into()));
    }
    let big = |i: usize, j: usize| if cost[i][j].is_infinite() { 1.0 } else { 0.0 };
    let fin = |i: usize, j: usize| if cost[i][j].is_infinite() { 0.0 } else { cost[i][j] };

    // North-west corner start: m + n - 1 basic cells forming a staircase tree.
    let mut basic: Vec<(usize, usize)> = Vec::with_capacity(m + n - 1);
    let mut x: Vec<f64> = Vec::with_capacity(m + n - 1);
    {
        let mut ra = supply.to_vec();
        let mut rb = demand.to_vec();
        let (mut i, mut j) = (0, 0);
        while i < m && j < n {
            let v = ra[i].min(rb[j]).max(0.0);
            basic.push((i, j));
            x.push(v);
            ra[i] -= v;
            rb[j] -= v;
            if i == m - 1 {
                j += 1;
            } else if j == n - 1 || ra[i] <= rb[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Rounding residue of the last row/column goes to the final cell.
        if let Some(last) = x.last_mut() {
            *last += ra[m - 1].max(0.0).min(rb[n - 1].max(0.0));
        }
    }

    let cmp_tol = 1e-12 * (1.0 + cost.iter().flatten().filter(|c| c.is_finite()).fold(0.0f64, |a, &b| a.max(b)));
    let mut degenerate_run = 0usize;
    let max_iter = 50 * (m + n) * (m + n) + 1000;
    for _ in 0..max_iter {
        // Potentials from the basic tree: u_i + v_j = c_ij, u_0 = 0.
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m + n];
        for (k, &(i, j)) in basic.iter().enumerate() {
            adj[i].push((m + j, k));
            adj[m + j].push((i, k));
        }
        let mut pot_a = vec![f64::NAN; m + n];
        let mut pot_b = vec![f64::NAN; m + n];
        pot_a[0] = 0.0;
        pot_b[0] = 0.0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(node) = queue.pop_front() {
            for &(nb, k) in &adj[node] {
                if pot_a[nb].is_nan() {
                    let (i, j) = basic[k];
                    // For a row node: v_j = c - u_i; for a column node: u_i = c - v_j.
                    pot_a[nb] = big(i, j) - pot_a[node];
                    pot_b[nb] = fin(i, j) - pot_b[node];
                    queue.push_back(nb);
                }
            }
        }
        if pot_a.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidInput("degenerate transport basis lost connectivity".into()));
        }

        let bland = degenerate_run >= DEGENERATE_SWITCH;
        let mut is_basic = vec![false; m * n];
        for &(i, j) in &basic {
            is_basic[i * n + j] = true;
        }
        let mut entering: Option<(usize, usize, f64, f64)> = None;
        'scan: for i in 0..m {
            for j in 0..n {
                if is_basic[i * n + j] {
                    continue;
                }
                let ra = big(i, j) - pot_a[i] - pot_a[m + j];
                let rb = fin(i, j) - pot_b[i] - pot_b[m + j];
                let negative = ra < -0.5 || (ra.abs() < 0.5 && rb < -cmp_tol);
                if !negative {
                    continue;
                }
                let better = match entering {
                    None => true,
                    Some((_, _, ea, eb)) => ra < ea - 0.5 || ((ra - ea).abs() < 0.5 && rb < eb),
                };
                if better {
                    entering = Some((i, j, ra, rb));
                    if bland {
                        break 'scan;
                    }
                }
            }
        }
        let Some((ei, ej, _, _)) = entering else {
            return finish(&basic, &x, cost, m, n);
        };

        // Path in the tree from row node ei to column node m + ej.
        let start = ei;
        let goal = m + ej;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + n];
        let mut seen = vec![false; m + n];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            if node == goal {
                break;
            }
            for &(nb, k) in &adj[node] {
                if !seen[nb] {
                    seen[nb] = true;
                    parent[nb] = Some((node, k));
                    queue.push_back(nb);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = goal;
        while node != start {
            let (prev, k) = parent[node].expect("tree is connected");
            path.push(k);
            node = prev;
        }
        // `path` lists cells from the column end back to the row end; the
        // first, third, ... lose mass.
        let mut leave_pos = None;
        let mut theta = f64::INFINITY;
        for (pos, &k) in path.iter().enumerate().step_by(2) {
            let better = x[k] < theta || (bland && x[k] == theta && leave_pos.is_some_and(|lp: usize| basic[k] < basic[path[lp]]));
            if better {
                theta = x[k];
                leave_pos = Some(pos);
            }
        }
        let leave_pos = leave_pos.expect("cycle has a losing cell");
        if theta <= 0.0 {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }
        for (pos, &k) in path.iter().enumerate() {
            if pos % 2 == 0 {
                x[k] = (x[k] - theta).max(0.0);
            } else {
                x[k] += theta;
            }
        }
        let leave = path[leave_pos];
        basic[leave] = (ei, ej);
        x[leave] = theta;
    }
    Err(Error::NoConvergence { iterations: max_iter, gap: f64::NAN })
}

fn finish(basic: &[(usize, usize)], x: &[f64], cost: &[Vec<f64>], _m: usize, _n: usize) -> Result<(f64, CouplingPlan)> {
    let mut moves = Vec::new();
    let mut terms = Vec::new();
    for (&(i, j), &v) in basic.iter().zip(x) {
        if v <= 0.0 {
            continue;
        }
        if cost[i][j].is_infinite() {
            if v > FORBIDDEN_MASS_TOL {
                return Err(Error::Infeasible(format!("every coupling moves mass {v:.3e} along an infinite-cost pair")));
            }
            continue;
        }
        moves.push(Move { source: i, target: j, mass: v });
        terms.push(v * cost[i][j]);
    }
    moves.sort_by_key(|mv| (mv.source, mv.target));
    let total = crate::solvers::pairwise_sum(&terms);
    Ok((total, CouplingPlan { moves, total_cost: total }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::norm::Norm;

    #[test]
    fn diracs() {
        let a = DiscreteDistribution::dirac(vec![1.0, 2.0]);
        let b = DiscreteDistribution::dirac(vec![4.0, 6.0]);
        let c = TransportCost::NormPower { norm: Norm::Two, p: 1 };
        let (v, plan) = ot_distance(&a, &a, &c).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(plan.moves.len(), 1);
        let (v, _) = ot_distance(&a, &b, &c).unwrap();
        assert_eq!(v, 5.0);
    }

    #[test]
    fn forbidden_cells() {
        let c = TransportCost::FeatureLabel { norm: Norm::One };
        let p = DiscreteDistribution::new(vec![vec![0.0, 1.0], vec![0.0, -1.0]], vec![0.5, 0.5]).unwrap();
        let q = DiscreteDistribution::new(vec![vec![2.0, -1.0], vec![1.0, 1.0]], vec![0.5, 0.5]).unwrap();
        let (v, _) = ot_distance(&p, &q, &c).unwrap();
        assert!((v - 1.5).abs() < 1e-15);
        let q_bad = DiscreteDistribution::new(vec![vec![2.0, -1.0], vec![1.0, 1.0]], vec![0.75, 0.25]).unwrap();
        assert!(matches!(ot_distance(&p, &q_bad, &c), Err(Error::Infeasible(_))));
    }
}
