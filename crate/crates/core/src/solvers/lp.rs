//! Dense two-phase revised simplex for small linear programs.
//!
//! Problems are converted to the standard form `min c'x, Ax = b, x >= 0`
//! (shifting bounded variables, splitting free ones, adding slacks), solved
//! with an explicit dense basis inverse, and mapped back. Pricing is Dantzig's
//! rule until a run of degenerate pivots triggers Bland's rule.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub sense: RowSense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// `(lower, upper)` per variable; infinite entries mean unbounded.
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: LpStatus,
    pub value: f64,
    pub primal: Vec<f64>,
    /// Shadow prices: derivative of the optimal value w.r.t. each row's rhs.
    pub duals: Vec<f64>,
    pub iterations: usize,
    pub primal_residual: f64,
}

impl LinearProgram {
    /// Nonnegative variables, no upper bounds.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram { sense, objective, constraints: Vec::new(), bounds: vec![(0.0, f64::INFINITY); n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: RowSense, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, sense, rhs });
        self
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.bounds[var] = (lower, upper);
        self
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(format!("{} bounds for {} variables", self.bounds.len(), n));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err("non-finite objective coefficient".into());
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(format!("row {i} has {} coefficients, expected {n}", row.coeffs.len()));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(format!("row {i} has non-finite entries"));
            }
        }
        for (j, &(l, u)) in self.bounds.iter().enumerate() {
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(format!("bad bounds on variable {j}"));
            }
        }
        Ok(())
    }
}

/// How an original variable is expressed in standard-form columns.
#[derive(Clone, Copy)]
enum VarMap {
    /// x = shift + col
    Shifted { col: usize, shift: f64 },
    /// x = shift - col
    Mirrored { col: usize, shift: f64 },
    /// x = pos - neg
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    a: Vec<Vec<f64>>, // rows x cols
    b: Vec<f64>,
    c: Vec<f64>,
    /// Sign applied to each original row (+1 or -1) to get b >= 0; None for bound rows.
    row_sign: Vec<f64>,
    n_orig_rows: usize,
    maps: Vec<VarMap>,
}

fn to_standard(lp: &LinearProgram) -> StandardForm {
    let n = lp.num_vars();
    let sign = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let mut ncols = 0usize;
    let mut maps = Vec::with_capacity(n);
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (l, u) = lp.bounds[j];
        if l.is_finite() {
            maps.push(VarMap::Shifted { col: ncols, shift: l });
            if u.is_finite() {
                upper_rows.push((ncols, u - l));
            }
            ncols += 1;
        } else if u.is_finite() {
            maps.push(VarMap::Mirrored { col: ncols, shift: u });
            ncols += 1;
        } else {
            maps.push(VarMap::Split { pos: ncols, neg: ncols + 1 });
            ncols += 2;
        }
    }
    let n_struct = ncols;
    let n_slack = lp.constraints.iter().filter(|r| r.sense != RowSense::Eq).count() + upper_rows.len();
    let total = n_struct + n_slack;
    let mut c = vec![0.0; total];
    for j in 0..n {
        let cj = sign * lp.objective[j];
        match maps[j] {
            VarMap::Shifted { col, .. } => c[col] += cj,
            VarMap::Mirrored { col, .. } => c[col] -= cj,
            VarMap::Split { pos, neg } => {
                c[pos] += cj;
                c[neg] -= cj;
            }
        }
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut row_sign = Vec::new();
    let mut slack = n_struct;
    for row in &lp.constraints {
        let mut r = vec![0.0; total];
        let mut rhs = row.rhs;
        for j in 0..n {
            let aij = row.coeffs[j];
            if aij == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shifted { col, shift } => {
                    r[col] += aij;
                    rhs -= aij * shift;
                }
                VarMap::Mirrored { col, shift } => {
                    r[col] -= aij;
                    rhs -= aij * shift;
                }
                VarMap::Split { pos, neg } => {
                    r[pos] += aij;
                    r[neg] -= aij;
                }
            }
        }
        match row.sense {
            RowSense::Le => {
                r[slack] = 1.0;
                slack += 1;
            }
            RowSense::Ge => {
                r[slack] = -1.0;
                slack += 1;
            }
            RowSense::Eq => {}
        }
        let s = if rhs < 0.0 { -1.0 } else { 1.0 };
        if s < 0.0 {
            r.iter_mut().for_each(|v| *v = -*v);
            rhs = -rhs;
        }
        a.push(r);
        b.push(rhs);
        row_sign.push(s);
    }
    for (col, ub) in upper_rows {
        let mut r = vec![0.0; total];
        r[col] = 1.0;
        r[slack] = 1.0;
        slack += 1;
        a.push(r);
        b.push(ub);
    }
    StandardForm { a, b, c, row_sign, n_orig_rows: lp.constraints.len(), maps }
}

struct Tableau<'a> {
    a: &'a [Vec<f64>],
    m: usize,
    binv: Vec<Vec<f64>>,
    basis: Vec<usize>,
    xb: Vec<f64>,
    b: &'a [f64],
    pivot_tol: f64,
}

impl<'a> Tableau<'a> {
    fn column(&self, j: usize, total_struct: usize) -> Vec<f64> {
        // Columns beyond the structural ones are artificials (identity).
        if j >= total_struct {
            let mut e = vec![0.0; self.m];
            e[j - total_struct] = 1.0;
            e
        } else {
            (0..self.m).map(|i| self.a[i][j]).collect()
        }
    }

    fn ftran(&self, col: &[f64]) -> Vec<f64> {
        self.binv.iter().map(|row| row.iter().zip(col).map(|(x, y)| x * y).sum()).collect()
    }

    fn duals(&self, cost: &dyn Fn(usize) -> f64) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (k, &bj) in self.basis.iter().enumerate() {
            let cb = cost(bj);
            if cb != 0.0 {
                for (yi, v) in y.iter_mut().zip(&self.binv[k]) {
                    *yi += cb * v;
                }
            }
        }
        y
    }

    fn pivot(&mut self, r: usize, entering: usize, alpha: &[f64]) {
        let piv = alpha[r];
        let theta = self.xb[r] / piv;
        for i in 0..self.m {
            if i != r {
                self.xb[i] -= theta * alpha[i];
            }
        }
        self.xb[r] = theta;
        let pivot_row: Vec<f64> = self.binv[r].iter().map(|v| v / piv).collect();
        for i in 0..self.m {
            if i != r && alpha[i] != 0.0 {
                let f = alpha[i];
                for (x, p) in self.binv[i].iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
        self.binv[r] = pivot_row;
        self.basis[r] = entering;
    }

    /// Recompute B^{-1} and x_B from scratch.
    fn refactor(&mut self, total_struct: usize) -> bool {
        let m = self.m;
        let mut bmat = DMatrix::<f64>::zeros(m, m);
        for (k, &j) in self.basis.iter().enumerate() {
            let col = self.column(j, total_struct);
            for i in 0..m {
                bmat[(i, k)] = col[i];
            }
        }
        match bmat.try_inverse() {
            Some(inv) => {
                for i in 0..m {
                    for k in 0..m {
                        self.binv[i][k] = inv[(i, k)];
                    }
                }
                self.xb = self.ftran(self.b);
                for v in self.xb.iter_mut() {
                    if *v < 0.0 && *v > -self.pivot_tol * 1e3 {
                        *v = 0.0;
                    }
                }
                true
            }
            None => false,
        }
    }
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

const DEGENERATE_SWITCH: usize = 500;
const REFACTOR_EVERY: usize = 64;

fn run_phase(
    t: &mut Tableau,
    total_struct: usize,
    n_cols: usize,
    cost: &dyn Fn(usize) -> f64,
    allowed: &dyn Fn(usize) -> bool,
    iters: &mut usize,
    max_iter: usize,
) -> PhaseOutcome {
    let mut degenerate_run = 0usize;
    let mut since_refactor = 0usize;
    let dual_tol = t.pivot_tol * 1e3;
    loop {
        if *iters >= max_iter {
            return PhaseOutcome::IterationLimit;
        }
        if since_refactor >= REFACTOR_EVERY {
            t.refactor(total_struct);
            since_refactor = 0;
        }
        let y = t.duals(cost);
        let bland = degenerate_run >= DEGENERATE_SWITCH;
        let mut in_basis = vec![false; n_cols];
        for &j in &t.basis {
            in_basis[j] = true;
        }
        let mut entering = None;
        let mut best = -dual_tol;
        for j in 0..n_cols {
            if in_basis[j] || !allowed(j) {
                continue;
            }
            let col_dot: f64 = if j >= total_struct {
                y[j - total_struct]
            } else {
                (0..t.m).map(|i| y[i] * t.a[i][j]).sum()
            };
            let d = cost(j) - col_dot;
            if bland {
                if d < -dual_tol {
                    entering = Some(j);
                    break;
                }
            } else if d < best {
                best = d;
                entering = Some(j);
            }
        }
        let Some(q) = entering else {
            // Confirm optimality on a freshly factored basis; drift in the
            // updated inverse can hide improving columns.
            if since_refactor > 0 && t.refactor(total_struct) {
                since_refactor = 0;
                continue;
            }
            return PhaseOutcome::Optimal;
        };
        let alpha = t.ftran(&t.column(q, total_struct));
        let mut leave: Option<usize> = None;
        let mut min_ratio = f64::INFINITY;
        for i in 0..t.m {
            if alpha[i] > t.pivot_tol * 1e3 {
                let ratio = t.xb[i].max(0.0) / alpha[i];
                let better = match leave {
                    None => true,
                    Some(r) => {
                        if ratio < min_ratio - 1e-14 {
                            true
                        } else if ratio <= min_ratio + 1e-14 {
                            if bland {
                                t.basis[i] < t.basis[r]
                            } else {
                                alpha[i] > alpha[r]
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    min_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return PhaseOutcome::Unbounded;
        };
        if min_ratio <= 1e-14 {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }
        if t.xb[r] < 0.0 {
            t.xb[r] = 0.0;
        }
        t.pivot(r, q, &alpha);
        for v in t.xb.iter_mut() {
            if *v < 0.0 && *v > -1e-11 {
                *v = 0.0;
            }
        }
        *iters += 1;
        since_refactor += 1;
    }
}

/// Solve a dense linear program.
pub fn lp_solve(lp: &LinearProgram) -> Result<SolveReport> {
    lp_solve_with(lp, &Tolerances::default(), 50_000)
}

pub fn lp_solve_with(lp: &LinearProgram, tol: &Tolerances, max_iter: usize) -> Result<SolveReport> {
    lp.validate().map_err(Error::InvalidInput)?;
    Ok(solve_validated(lp, tol, max_iter))
}

fn solve_validated(lp: &LinearProgram, tol: &Tolerances, max_iter: usize) -> SolveReport {
    let sf = to_standard(lp);
    let m = sf.a.len();
    let n_struct = sf.c.len();
    let n_cols = n_struct + m;
    let failure = |status, iterations| SolveReport {
        status,
        value: f64::NAN,
        primal: vec![f64::NAN; lp.num_vars()],
        duals: vec![f64::NAN; lp.constraints.len()],
        iterations,
        primal_residual: f64::NAN,
    };

    let mut t = Tableau {
        a: &sf.a,
        m,
        binv: (0..m).map(|i| (0..m).map(|k| if i == k { 1.0 } else { 0.0 }).collect()).collect(),
        basis: (n_struct..n_cols).collect(),
        xb: sf.b.clone(),
        b: &sf.b,
        pivot_tol: tol.pivot,
    };
    let mut iters = 0usize;

    // Phase 1: minimise the sum of artificials.
    let phase1_cost = |j: usize| if j >= n_struct { 1.0 } else { 0.0 };
    match run_phase(&mut t, n_struct, n_cols, &phase1_cost, &|_| true, &mut iters, max_iter) {
        PhaseOutcome::IterationLimit => return failure(LpStatus::IterationLimit, iters),
        PhaseOutcome::Unbounded => unreachable!("phase one is bounded below by zero"),
        PhaseOutcome::Optimal => {}
    }
    t.refactor(n_struct);
    let infeas: f64 = t.basis.iter().zip(&t.xb).filter(|(&j, _)| j >= n_struct).map(|(_, &v)| v).sum();
    let scale = 1.0 + sf.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if infeas > tol.feasibility * scale {
        return failure(LpStatus::Infeasible, iters);
    }
    // Drive remaining zero-level artificials out of the basis where possible.
    for r in 0..m {
        if t.basis[r] < n_struct {
            continue;
        }
        let row = t.binv[r].clone();
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n_struct {
            if t.basis.contains(&j) {
                continue;
            }
            let v: f64 = (0..m).map(|i| row[i] * sf.a[i][j]).sum();
            if v.abs() > 1e-9 && best.is_none_or(|(_, bv)| v.abs() > bv.abs()) {
                best = Some((j, v));
            }
        }
        if let Some((j, _)) = best {
            let alpha = t.ftran(&t.column(j, n_struct));
            t.xb[r] = 0.0;
            t.pivot(r, j, &alpha);
        }
    }

    // Phase 2 on structural columns only.
    let phase2_cost = |j: usize| if j >= n_struct { 0.0 } else { sf.c[j] };
    let outcome = run_phase(&mut t, n_struct, n_cols, &phase2_cost, &|j| j < n_struct, &mut iters, max_iter);
    match outcome {
        PhaseOutcome::IterationLimit => return failure(LpStatus::IterationLimit, iters),
        PhaseOutcome::Unbounded => return failure(LpStatus::Unbounded, iters),
        PhaseOutcome::Optimal => {}
    }
    t.refactor(n_struct);

    let mut xs = vec![0.0; n_struct];
    for (k, &j) in t.basis.iter().enumerate() {
        if j < n_struct {
            xs[j] = t.xb[k].max(0.0);
        }
    }
    let x: Vec<f64> = sf
        .maps
        .iter()
        .map(|m| match *m {
            VarMap::Shifted { col, shift } => shift + xs[col],
            VarMap::Mirrored { col, shift } => shift - xs[col],
            VarMap::Split { pos, neg } => xs[pos] - xs[neg],
        })
        .collect();
    let y_std = t.duals(&phase2_cost);
    let sense_sign = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let duals: Vec<f64> = (0..sf.n_orig_rows).map(|i| sense_sign * sf.row_sign[i] * y_std[i]).collect();
    let value: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    let mut residual = 0.0f64;
    for row in &lp.constraints {
        let ax: f64 = row.coeffs.iter().zip(&x).map(|(a, v)| a * v).sum();
        let viol = match row.sense {
            RowSense::Le => (ax - row.rhs).max(0.0),
            RowSense::Ge => (row.rhs - ax).max(0.0),
            RowSense::Eq => (ax - row.rhs).abs(),
        };
        residual = residual.max(viol);
    }
    for (&(l, u), &v) in lp.bounds.iter().zip(&x) {
        residual = residual.max((l - v).max(0.0)).max((v - u).max(0.0));
    }
    SolveReport { status: LpStatus::Optimal, value, primal: x, duals, iterations: iters, primal_residual: residual }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable_max() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0]);
        lp.add_row(vec![1.0], RowSense::Le, 3.0);
        let r = lp_solve(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.value - 3.0).abs() < 1e-12);
        assert!((r.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0, 1.0]);
        lp.add_row(vec![1.0, 1.0], RowSense::Le, 1.0);
        lp.add_row(vec![1.0, 1.0], RowSense::Ge, 2.0);
        assert_eq!(lp_solve(&lp).unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0, 0.0]);
        lp.add_row(vec![1.0, -1.0], RowSense::Le, 1.0);
        assert_eq!(lp_solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_bounded_variables() {
        // min |x - 2| via epigraph, x free, t in [0, 10]
        let mut lp = LinearProgram::new(Sense::Minimize, vec![0.0, 1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_bounds(1, 0.0, 10.0);
        lp.add_row(vec![1.0, -1.0], RowSense::Le, 2.0);
        lp.add_row(vec![-1.0, -1.0], RowSense::Le, -2.0);
        let r = lp_solve(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!(r.value.abs() < 1e-12);
        assert!((r.primal[0] - 2.0).abs() < 1e-12);

        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0, 1.0]);
        lp.set_bounds(0, -1.0, 0.5);
        lp.set_bounds(1, f64::NEG_INFINITY, 4.0);
        let r = lp_solve(&lp).unwrap();
        assert!((r.value - 4.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_lp_terminates() {
        // Classic Beale cycling example.
        let mut lp = LinearProgram::new(Sense::Minimize, vec![-0.75, 150.0, -0.02, 6.0]);
        lp.add_row(vec![0.25, -60.0, -0.04, 9.0], RowSense::Le, 0.0);
        lp.add_row(vec![0.5, -90.0, -0.02, 3.0], RowSense::Le, 0.0);
        lp.add_row(vec![0.0, 0.0, 1.0, 0.0], RowSense::Le, 1.0);
        let r = lp_solve(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.value + 0.05).abs() < 1e-10);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0, 2.0, 3.0]);
        lp.add_row(vec![1.0, 1.0, 1.0], RowSense::Eq, 1.0);
        lp.add_row(vec![2.0, 2.0, 2.0], RowSense::Eq, 2.0);
        lp.add_row(vec![0.0, 1.0, 0.0], RowSense::Ge, 0.25);
        let r = lp_solve(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.value - 1.25).abs() < 1e-12);
        assert!(r.primal_residual < 1e-12);
    }
}
