use drokit::ctransform::dro_value_via_envelope;
use drokit::domain::{DiscreteDistribution, Norm};
use drokit::envelopes::{SmoothLoss, UnivariateLoss};
use drokit::regbounds::{lipschitz_bound, variation_bound, wasserstein_bound, DerivativeProfile, WassersteinVariant};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_of(i: usize) -> Norm {
    [Norm::One, Norm::Two, Norm::Infinity][i % 3]
}

/// Exact profile of `z -> L(<theta, z>)` for a smooth scalar `L` up to order `p`,
/// given `L'`, `L''` and the Lipschitz moduli of `L^(k-1)` as scalar constants.
fn composite_profile(
    loss: &UnivariateLoss,
    second: f64,
    lips: &[Option<f64>],
    theta: &[f64],
    norm: Norm,
    atoms: &[Vec<f64>],
    p: u32,
) -> DerivativeProfile {
    let n = norm.dual_eval(theta);
    let s: Vec<f64> = atoms.iter().map(|z| dot(theta, z)).collect();
    let mut tensor_norms = Vec::new();
    if p >= 2 {
        tensor_norms.push(Some(s.iter().map(|v| loss.derivative(*v).abs() * n).collect()));
    }
    if p >= 3 {
        tensor_norms.push(Some(vec![second.abs() * n * n; s.len()]));
    }
    let lipschitz = lips.iter().enumerate().map(|(k, l)| l.map(|v| v * n.powi(k as i32 + 1))).collect();
    DerivativeProfile { values: s.iter().map(|v| loss.eval(*v)).collect(), tensor_norms, lipschitz }
}

#[test]
fn concave_quadratic_example() {
    // l(z) = -z^2/2 around zhat = 0: l(0) = 0, l'(0) = 0, |l''| = 1, l''' = 0.
    let prof = DerivativeProfile { values: vec![0.0], tensor_norms: vec![Some(vec![0.0]), Some(vec![1.0])], lipschitz: vec![None, None, Some(0.0)] };
    for eps in [0.5f64, 0.1, 1e-3] {
        let w = wasserstein_bound(&prof, &[1.0], 3, eps, WassersteinVariant::Variation).unwrap();
        assert_eq!(w.terms, vec![0.0, eps * eps / 2.0, 0.0]);
        assert_eq!(w.total, eps * eps / 2.0);
        let v = variation_bound(&prof, &[1.0], 3, eps).unwrap();
        assert!((v.total - eps.powf(2.0 / 3.0) / 2.0).abs() < 1e-15);
    }
    // -z^2/2 <= 0 with equality at the reference point, so the exact worst case is 0
    // and the bound overshoots by exactly eps^2/2.
    let exact = 0.0;
    let w = wasserstein_bound(&prof, &[1.0], 3, 0.1, WassersteinVariant::Variation).unwrap();
    assert!(w.total - exact == 0.1f64 * 0.1 / 2.0);
}

#[test]
fn trivial_profiles() {
    let zero = DerivativeProfile {
        values: vec![1.5, 2.5],
        tensor_norms: vec![Some(vec![0.0, 0.0])],
        lipschitz: vec![Some(0.0), Some(0.0)],
    };
    let w = [0.5, 0.5];
    assert_eq!(variation_bound(&zero, &w, 2, 0.3).unwrap().total, 2.0);
    assert_eq!(lipschitz_bound(&zero, &w, 2, 0.3).unwrap().total, 2.0);
    let busy = DerivativeProfile { values: vec![1.5, 2.5], tensor_norms: vec![Some(vec![3.0, 1.0])], lipschitz: vec![Some(4.0), Some(7.0)] };
    for variant in [WassersteinVariant::Variation, WassersteinVariant::Lipschitz] {
        assert_eq!(wasserstein_bound(&busy, &w, 2, 0.0, variant).unwrap().total, 2.0);
    }
    let r = variation_bound(&busy, &w, 2, 0.3).unwrap();
    assert!((r.total - r.nominal - r.terms.iter().sum::<f64>()).abs() < 1e-15);
}

#[test]
fn linear_loss_bound_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let identity = UnivariateLoss::SmoothCustom(SmoothLoss::quadratic_poly(0.0, 1.0, 0.0));
    for i in 0..15 {
        let norm = norm_of(i);
        let a: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let atoms: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let dist = DiscreteDistribution::uniform(atoms.clone()).unwrap();
        let eps = rng.random_range(0.01..1.0);
        let prof = DerivativeProfile {
            values: atoms.iter().map(|z| dot(&a, z)).collect(),
            tensor_norms: vec![],
            lipschitz: vec![Some(norm.dual_eval(&a))],
        };
        let b = variation_bound(&prof, dist.weights(), 1, eps).unwrap();
        let exact = dro_value_via_envelope(&identity, norm, 1, &a, &dist, eps).unwrap();
        assert!((b.total - (b.nominal + eps * norm.dual_eval(&a))).abs() < 1e-12);
        assert!((b.total - exact.value).abs() < 1e-9, "{norm}: {} vs {}", b.total, exact.value);
    }
}

#[test]
fn bounds_dominate_exact_worst_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for i in 0..30 {
        let norm = norm_of(i);
        let theta: Vec<f64> = (0..2).map(|_| rng.random_range(-1.5..1.5)).collect();
        let atoms: Vec<Vec<f64>> = (0..3).map(|_| (0..2).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let dist = DiscreteDistribution::uniform(atoms.clone()).unwrap();
        let w = dist.weights();
        let eps = rng.random_range(0.01..0.5);

        // Convex quadratic a s^2 + b s, transport cost ||z - zhat||^2.
        let (a, b) = (rng.random_range(0.1..1.0), rng.random_range(-1.0..1.0));
        let quad = UnivariateLoss::SmoothCustom(SmoothLoss::quadratic_poly(a, b, 0.0));
        let prof = composite_profile(&quad, 2.0 * a, &[None, Some(2.0 * a)], &theta, norm, &atoms, 2);
        let exact = dro_value_via_envelope(&quad, norm, 2, &theta, &dist, eps).unwrap().value;
        let bound = variation_bound(&prof, w, 2, eps).unwrap().total;
        assert!(bound >= exact - 1e-9, "quadratic {norm}: {bound} < {exact}");

        // Same loss, 3-Wasserstein ball of radius r (budget r^3).
        let r = eps.cbrt();
        let prof3 = composite_profile(&quad, 2.0 * a, &[None, None, Some(0.0)], &theta, norm, &atoms, 3);
        let exact3 = dro_value_via_envelope(&quad, norm, 3, &theta, &dist, r * r * r).unwrap().value;
        let bound3 = wasserstein_bound(&prof3, w, 3, r, WassersteinVariant::Variation).unwrap().total;
        assert!(bound3 >= exact3 - 1e-9, "cubic cost {norm}: {bound3} < {exact3}");

        // Hinge under the plain norm cost: the bound is attained.
        let hinge = UnivariateLoss::Hinge;
        let profh = composite_profile(&hinge, 0.0, &[Some(1.0)], &theta, norm, &atoms, 1);
        let exacth = dro_value_via_envelope(&hinge, norm, 1, &theta, &dist, eps).unwrap().value;
        let boundh = lipschitz_bound(&profh, w, 1, eps).unwrap().total;
        assert!((boundh - exacth).abs() < 1e-9);
    }
}

#[test]
fn wasserstein_bound_is_first_order_tight() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let losses = [
        (UnivariateLoss::SmoothCustom(SmoothLoss::logistic()), 0.25),
        (UnivariateLoss::SmoothCustom(SmoothLoss::quadratic_poly(0.5, -0.3, 0.1)), 1.0),
    ];
    for (loss, m) in &losses {
        let norm = Norm::Two;
        let theta: Vec<f64> = (0..2).map(|_| rng.random_range(-1.5..1.5)).collect();
        let atoms: Vec<Vec<f64>> = (0..3).map(|_| (0..2).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let dist = DiscreteDistribution::uniform(atoms.clone()).unwrap();
        let prof = composite_profile(loss, 0.0, &[None, Some(*m)], &theta, norm, &atoms, 2);
        let mut ratios = Vec::new();
        for r in [1e-2, 1e-3, 1e-4] {
            let bound = wasserstein_bound(&prof, dist.weights(), 2, r, WassersteinVariant::Variation).unwrap().total;
            let exact = dro_value_via_envelope(loss, norm, 2, &theta, &dist, r * r).unwrap().value;
            assert!(bound >= exact - 1e-9);
            ratios.push((bound - exact) / r);
        }
        assert!(ratios.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{ratios:?}");
        assert!(ratios[2] <= 0.05, "{ratios:?}");
    }
}

fn profile_pair() -> impl Strategy<Value = (DerivativeProfile, Vec<f64>)> {
    (1usize..5).prop_flat_map(|j| {
        (
            prop::collection::vec(-2.0..2.0f64, j),
            prop::collection::vec(0.0..3.0f64, j),
            prop::collection::vec(0.0..3.0f64, j),
            prop::collection::vec(0.0..2.0f64, 3),
            prop::collection::vec(0.01..1.0f64, j),
        )
            .prop_map(|(values, d1, d2, extra, w)| {
                let total: f64 = w.iter().sum();
                let w: Vec<f64> = w.iter().map(|v| v / total).collect();
                let m1 = d1.iter().fold(0.0f64, |a, b| a.max(*b));
                let m2 = d2.iter().fold(0.0f64, |a, b| a.max(*b));
                // lip(D^{k-1} l) can never be below sup_j ||D^k l(zhat_j)||.
                let prof = DerivativeProfile {
                    values,
                    tensor_norms: vec![Some(d1), Some(d2)],
                    lipschitz: vec![Some(m1 + extra[0]), Some(m2 + extra[1]), Some(extra[2])],
                };
                (prof, w)
            })
    })
}

proptest! {
    #[test]
    fn lipschitz_variant_dominates_variation((prof, w) in profile_pair(), eps in 0.0..2.0f64) {
        for p in 1..=3u32 {
            let v = variation_bound(&prof, &w, p, eps).unwrap().total;
            let l = lipschitz_bound(&prof, &w, p, eps).unwrap().total;
            prop_assert!(l >= v - 1e-12);
            let wv = wasserstein_bound(&prof, &w, p, eps, WassersteinVariant::Variation).unwrap().total;
            let wl = wasserstein_bound(&prof, &w, p, eps, WassersteinVariant::Lipschitz).unwrap().total;
            prop_assert!(wl >= wv - 1e-12);
        }
    }
}
