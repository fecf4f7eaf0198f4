//! Log-barrier path following for small smooth convex programs with a linear
//! objective, using dense Newton steps.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Smooth barrier of the feasible set: `None` outside the interior, otherwise
/// value, gradient and Hessian.
pub type BarrierEval = Option<(f64, DVector<f64>, DMatrix<f64>)>;

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierReport {
    pub x: DVector<f64>,
    pub value: f64,
    /// Bound on the suboptimality, `m / t` at exit.
    pub gap_bound: f64,
    pub newton_steps: usize,
}

/// Minimize `c'x` over the interior of the set described by `barrier`.
/// `m` is the barrier parameter (number of log terms, counting a second-order
/// cone as 2). `x0` must be strictly feasible.
pub fn barrier_minimize<B>(c: &DVector<f64>, barrier: B, m: f64, x0: DVector<f64>, tol: f64) -> Result<BarrierReport>
where
    B: Fn(&DVector<f64>) -> BarrierEval,
{
    if barrier(&x0).is_none() {
        return Err(Error::Domain("barrier start point is not strictly feasible".into()));
    }
    let mut x = x0;
    let mut t = 1.0;
    let mu = 10.0;
    let mut newton_steps = 0;
    loop {
        // Centering: minimize t c'x + phi(x).
        for _ in 0..100 {
            let (phi, g, h) = barrier(&x).expect("iterate left the interior");
            let grad = c * t + g;
            let step = match h.clone().cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => {
                    let reg = h + DMatrix::identity(x.len(), x.len()) * 1e-12;
                    reg.lu().solve(&(-&grad)).ok_or_else(|| Error::Domain("singular Newton system".into()))?
                }
            };
            let decrement2 = -grad.dot(&step);
            newton_steps += 1;
            if decrement2 / 2.0 <= 1e-10 {
                break;
            }
            // Compare differences rather than totals: t c'x dwarfs the decrease late on.
            let slope = t * c.dot(&step);
            let mut s = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let cand = &x + &step * s;
                if let Some((pc, _, _)) = barrier(&cand) {
                    if s * slope + (pc - phi) <= -0.25 * s * decrement2 {
                        x = cand;
                        accepted = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if m / t < tol {
            break;
        }
        t *= mu;
    }
    let value = c.dot(&x);
    Ok(BarrierReport { x, value, gap_bound: m / t, newton_steps })
}

/// Barrier terms for `a'x + b > 0`: adds `-log(a'x + b)`.
pub fn add_linear_term(
    x: &DVector<f64>,
    a: &DVector<f64>,
    b: f64,
    acc: &mut (f64, DVector<f64>, DMatrix<f64>),
) -> bool {
    let s = a.dot(x) + b;
    if !(s > 0.0) {
        return false;
    }
    acc.0 -= s.ln();
    acc.1 -= a / s;
    acc.2 += a * a.transpose() / (s * s);
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_on_box() {
        // min x + y on [0,1]^2 -> 0.
        let c = DVector::from_vec(vec![1.0, 1.0]);
        let barrier = |x: &DVector<f64>| {
            let mut acc = (0.0, DVector::zeros(2), DMatrix::zeros(2, 2));
            for i in 0..2 {
                let mut e = DVector::zeros(2);
                e[i] = 1.0;
                if !add_linear_term(x, &e, 0.0, &mut acc) || !add_linear_term(x, &(-e), 1.0, &mut acc) {
                    return None;
                }
            }
            Some(acc)
        };
        let r = barrier_minimize(&c, barrier, 4.0, DVector::from_vec(vec![0.5, 0.5]), 1e-10).unwrap();
        assert!(r.value.abs() < 1e-9);
    }
}
