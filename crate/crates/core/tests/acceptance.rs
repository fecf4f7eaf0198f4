//! Acceptance criteria. Runs without the test harness and prints one
//! PASS/FAIL line per criterion; exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::{envelope_oracle, grid_worst_case, portfolio_ctransform_oracle, random_simplex};
use drokit::ctransform::{dro_value_via_envelope, quadratic_lambda_interval};
use drokit::domain::{DiscreteDistribution, Norm};
use drokit::envelopes::{envelope_limit_check, envelope_value, SmoothLoss, UnivariateLoss};
use drokit::nash_svm::{gaussian_blobs, nash_family, solve_dual_light, solve_primal_svm, verify_saddle, worst_case_for_theta, Alpha};
use drokit::portfolio::{
    portfolio_ctransform, portfolio_gradients, run_experiment, solve_portfolio, solve_saa, summarize, ExperimentConfig,
    PortfolioProblem, SolveOptions,
};
use drokit::regbounds::{lipschitz_bound, variation_bound, wasserstein_bound, DerivativeProfile, WassersteinVariant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

type Outcome = Result<String, String>;

const NORMS: [Norm; 3] = [Norm::One, Norm::Two, Norm::Infinity];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn svm_strong_duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut report = Vec::new();
    for norm in NORMS {
        let start = Instant::now();
        let mut worst = 0.0f64;
        for seed in 0..100 {
            let data = gaussian_blobs(10, 10_000 + seed);
            let eps = rng.random_range(0.02..0.5);
            let p = solve_primal_svm(&data, norm, eps, 1e-6).map_err(|e| format!("{norm} seed {seed}: {e}"))?;
            let d = solve_dual_light(&data, norm, eps).map_err(|e| format!("{norm} seed {seed}: {e}"))?;
            worst = worst.max((p.value - d.value).abs());
        }
        let secs = start.elapsed().as_secs_f64();
        ensure(worst <= 1e-6, || format!("{norm}: gap {worst:.2e}"))?;
        ensure(secs < 5.0, || format!("{norm}: {secs:.2}s"))?;
        report.push(format!("{norm}: max gap {worst:.1e} in {secs:.2}s"));
    }
    Ok(report.join(", "))
}

/// Solves 20 blob instances with |J+| >= 2 and returns the emitted
/// distributions alongside the worst residual and constancy spread.
fn nash_instances() -> Result<(f64, f64, Vec<(drokit::domain::LabeledDataset, Norm, f64, drokit::nash_svm::PerturbedDataset)>), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut emitted = Vec::new();
    let (mut resid, mut spread) = (0.0f64, 0.0f64);
    let mut used = 0;
    let mut seed = 20_000;
    while used < 20 {
        seed += 1;
        let norm = NORMS[used % 3];
        let data = gaussian_blobs(10, seed);
        let eps = rng.random_range(0.05..0.4);
        let p = solve_primal_svm(&data, norm, eps, 1e-8).map_err(|e| e.to_string())?;
        let d = solve_dual_light(&data, norm, eps).map_err(|e| e.to_string())?;
        if d.j_plus.len() < 2 {
            continue;
        }
        used += 1;
        let mut random = vec![0.0; data.len()];
        for &j in &d.j_plus {
            random[j] = rng.random_range(0.1..1.0);
        }
        let s: f64 = random.iter().sum();
        random.iter_mut().for_each(|v| *v /= s);
        let alphas = [
            Alpha::Uniform.resolve(&d).unwrap(),
            Alpha::Single(*d.j_plus.last().unwrap()).resolve(&d).unwrap(),
            random,
        ];
        let mut values = Vec::new();
        for a in &alphas {
            let q = nash_family(&data, &d, a).map_err(|e| e.to_string())?;
            let c = verify_saddle(&data, norm, eps, &p.theta, &q, 50_000).map_err(|e| e.to_string())?;
            resid = resid.max(c.left_residual.abs()).max(c.right_residual.abs());
            values.push(q.expected_hinge(&p.theta));
            emitted.push((data.clone(), norm, eps, q));
        }
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        spread = spread.max(hi - lo);
        let wc = worst_case_for_theta(&data, norm, eps, &p.theta).map_err(|e| e.to_string())?;
        emitted.push((data, norm, eps, wc));
    }
    Ok((resid, spread, emitted))
}

fn nash_saddle() -> Outcome {
    let (resid, spread, _) = nash_instances()?;
    ensure(resid <= 1e-5, || format!("residual {resid:.2e}"))?;
    ensure(spread <= 1e-7, || format!("value spread {spread:.2e}"))?;
    Ok(format!("max residual {resid:.1e}, value spread across alpha {spread:.1e}"))
}

fn transport_feasibility() -> Outcome {
    let (_, _, emitted) = nash_instances()?;
    let mut worst = f64::NEG_INFINITY;
    for (data, norm, eps, q) in &emitted {
        for a in &q.atoms {
            ensure(a.label == data.labels()[a.source], || "label changed".into())?;
        }
        let cost = q.transport_cost_exact(data, *norm).map_err(|e| e.to_string())?;
        worst = worst.max(cost - eps);
    }
    ensure(worst <= 1e-9, || format!("budget exceeded by {worst:.2e}"))?;
    Ok(format!("{} distributions, max cost - eps = {worst:.1e}", emitted.len()))
}

fn portfolio_ctransform_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let d = rng.random_range(1..11);
        let theta = random_simplex(&mut rng, d);
        let lambda = 1.0 / d as f64 + 0.01 + rng.random_range(0.0..2.0);
        let z: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..3.0)).collect();
        let c = portfolio_ctransform(&theta, lambda, &z).map_err(|e| e.to_string())?;
        worst = worst.max((c.value - portfolio_ctransform_oracle(&theta, lambda, &z)).abs());
    }
    ensure(worst <= 1e-8, || format!("closed form vs oracle {worst:.2e}"))?;

    let mut grad_err = 0.0f64;
    for _ in 0..50 {
        let d = rng.random_range(1..8);
        let theta = random_simplex(&mut rng, d);
        let lambda = 1.0 / d as f64 + 0.05 + rng.random_range(0.0..1.5);
        let z: Vec<f64> = (0..d).map(|_| rng.random_range(0.3..2.5)).collect();
        let eps = rng.random_range(0.0..0.3);
        let f = |t: &[f64], l: f64| l * eps + portfolio_ctransform(t, l, &z).unwrap().value;
        let (gt, gl) = portfolio_gradients(&theta, lambda, &z, eps).map_err(|e| e.to_string())?;
        let h = 1e-6;
        let rel = |fd: f64, g: f64| (fd - g).abs() / g.abs().max(1e-2);
        grad_err = grad_err.max(rel((f(&theta, lambda + h) - f(&theta, lambda - h)) / (2.0 * h), gl));
        for i in 0..d {
            let step = h.min(theta[i] / 2.0);
            let (mut up, mut dn) = (theta.clone(), theta.clone());
            up[i] += step;
            dn[i] -= step;
            grad_err = grad_err.max(rel((f(&up, lambda) - f(&dn, lambda)) / (2.0 * step), gt[i]));
        }
    }
    ensure(grad_err <= 1e-5, || format!("gradient relative error {grad_err:.2e}"))?;

    let mut infinite = 0;
    for _ in 0..100 {
        let d = rng.random_range(2..11);
        let theta = random_simplex(&mut rng, d);
        let lambda = rng.random_range(0.0..1.0) / d as f64;
        let z: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..3.0)).collect();
        if portfolio_ctransform(&theta, lambda, &z).map_err(|e| e.to_string())?.value == f64::INFINITY {
            infinite += 1;
        }
    }
    ensure(infinite == 100, || format!("{infinite}/100 infinite below the threshold"))?;
    Ok(format!("oracle gap {worst:.1e}, gradient error {grad_err:.1e}, 100/100 infinite"))
}

fn envelope_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let hinge = |x: f64| (1.0 - x).max(0.0);
    let zero_one = |x: f64| if x <= 0.0 { 1.0 } else { 0.0 };
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s: f64 = rng.random_range(-3.0..3.0);
        let l: f64 = rng.random_range(1.0..10.0);
        let v = envelope_value(&UnivariateLoss::Hinge, 1, s, l).unwrap();
        worst = worst.max((v - envelope_oracle(hinge, 1, s, l, 10.0, &[1.0])).abs());
        let l: f64 = rng.random_range(0.05..10.0);
        let v = envelope_value(&UnivariateLoss::ZeroOne, 1, s, l).unwrap();
        worst = worst.max((v - envelope_oracle(zero_one, 1, s, l, 10.0, &[0.0])).abs());
        let v = envelope_value(&UnivariateLoss::ZeroOne, 2, s, l).unwrap();
        worst = worst.max((v - envelope_oracle(zero_one, 2, s, l, 10.0, &[0.0])).abs());
        let l: f64 = rng.random_range(1.2..10.0);
        let v = envelope_value(&UnivariateLoss::Quadratic, 2, s, l).unwrap();
        worst = worst.max((v - envelope_oracle(|x| x * x, 2, s, l, 40.0, &[])).abs() / (1.0 + v));
    }
    ensure(worst <= 1e-6, || format!("closed form vs oracle {worst:.2e}"))?;

    let schedule: Vec<f64> = (1..=20).map(|k| 2f64.powi(k)).collect();
    let mut final_gap = 0.0f64;
    for (loss, p) in [(UnivariateLoss::Quadratic, 2), (UnivariateLoss::ZeroOne, 1), (UnivariateLoss::ZeroOne, 2)] {
        for s in [-1.5, -0.1, 0.0, 0.05, 0.3, 1.0, 2.0] {
            let vals = envelope_limit_check(&loss, p, s, &schedule).map_err(|e| e.to_string())?;
            let gaps: Vec<f64> = vals.iter().map(|v| (v - loss.eval(s)).abs()).collect();
            ensure(gaps.windows(2).all(|w| w[1] <= w[0]), || format!("{} p={p} s={s}: not monotone", loss.name()))?;
            final_gap = final_gap.max(gaps[19]);
        }
    }
    ensure(final_gap <= 1e-3, || format!("gap at 2^20 is {final_gap:.2e}"))?;
    Ok(format!("max oracle gap {worst:.1e}, max gap at 2^20 {final_gap:.1e}"))
}

fn quadratic_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    let (mut worst, mut outside) = (0.0f64, 0);
    for i in 0..50 {
        let norm = NORMS[i % 3];
        let d = rng.random_range(1..4);
        let n = rng.random_range(1..6);
        let atoms: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let w = random_simplex(&mut rng, n);
        let dist = DiscreteDistribution::new(atoms, w).map_err(|e| e.to_string())?;
        let theta: Vec<f64> = (0..d).map(|_| rng.random_range(-1.5..1.5)).collect();
        let eps = rng.random_range(0.01..1.0);
        let r = dro_value_via_envelope(&UnivariateLoss::Quadratic, norm, 2, &theta, &dist, eps).map_err(|e| e.to_string())?;
        let second: f64 = dist.atoms().iter().zip(dist.weights()).map(|(z, w)| w * dot(&theta, z).powi(2)).sum();
        let closed = (second.sqrt() + eps.sqrt() * norm.dual_eval(&theta)).powi(2);
        worst = worst.max((r.value - closed).abs());
        let interval = quadratic_lambda_interval(&theta, norm, eps, 2.0, 4.0 * second).map_err(|e| e.to_string())?;
        if !interval.contains(r.lambda_star * r.scale, 1e-9 * (1.0 + interval.upper)) {
            outside += 1;
        }
    }
    ensure(worst <= 1e-7, || format!("closed form gap {worst:.2e}"))?;
    ensure(outside == 0, || format!("{outside}/50 multipliers outside the interval"))?;
    Ok(format!("max gap {worst:.1e}, 50/50 multipliers inside the interval"))
}

fn composite_profile(loss: &UnivariateLoss, lips: &[Option<f64>], second: f64, theta: &[f64], norm: Norm, atoms: &[Vec<f64>], p: u32) -> DerivativeProfile {
    let n = norm.dual_eval(theta);
    let s: Vec<f64> = atoms.iter().map(|z| dot(theta, z)).collect();
    let mut tensor_norms = Vec::new();
    if p >= 2 {
        tensor_norms.push(Some(s.iter().map(|v| loss.derivative(*v).abs() * n).collect()));
    }
    if p >= 3 {
        tensor_norms.push(Some(vec![second * n * n; s.len()]));
    }
    let lipschitz = lips.iter().enumerate().map(|(k, l)| l.map(|v| v * n.powi(k as i32 + 1))).collect();
    DerivativeProfile { values: s.iter().map(|v| loss.eval(*v)).collect(), tensor_norms, lipschitz }
}

fn regularization_bounds() -> Outcome {
    let prof = DerivativeProfile { values: vec![0.0], tensor_norms: vec![Some(vec![0.0]), Some(vec![1.0])], lipschitz: vec![None, None, Some(0.0)] };
    let eps = 0.1;
    let b = wasserstein_bound(&prof, &[1.0], 3, eps, WassersteinVariant::Variation).map_err(|e| e.to_string())?;
    // -z^2/2 <= 0 = loss at the reference point, so the exact worst case is 0.
    ensure(b.total == eps * eps / 2.0, || format!("bound {} != eps^2/2", b.total))?;

    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    let mut min_slack = f64::INFINITY;
    let mut checked = 0;
    for i in 0..30 {
        let norm = NORMS[i % 3];
        let theta: Vec<f64> = (0..2).map(|_| rng.random_range(-1.5..1.5)).collect();
        let atoms: Vec<Vec<f64>> = (0..3).map(|_| (0..2).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let dist = DiscreteDistribution::uniform(atoms.clone()).map_err(|e| e.to_string())?;
        let w = dist.weights();
        let eps = rng.random_range(0.01..0.5);
        let (a, bq) = (rng.random_range(0.1..1.0), rng.random_range(-1.0..1.0));
        let quad = UnivariateLoss::SmoothCustom(SmoothLoss::quadratic_poly(a, bq, 0.0));
        let err = |e: drokit::Error| e.to_string();

        let exact = dro_value_via_envelope(&quad, norm, 2, &theta, &dist, eps).map_err(err)?.value;
        let prof = composite_profile(&quad, &[None, Some(2.0 * a)], 0.0, &theta, norm, &atoms, 2);
        min_slack = min_slack.min(variation_bound(&prof, w, 2, eps).map_err(err)?.total - exact);

        let r = eps.cbrt();
        let exact3 = dro_value_via_envelope(&quad, norm, 3, &theta, &dist, r * r * r).map_err(err)?.value;
        let prof3 = composite_profile(&quad, &[None, None, Some(0.0)], 2.0 * a, &theta, norm, &atoms, 3);
        min_slack = min_slack.min(wasserstein_bound(&prof3, w, 3, r, WassersteinVariant::Variation).map_err(err)?.total - exact3);

        let exacth = dro_value_via_envelope(&UnivariateLoss::Hinge, norm, 1, &theta, &dist, eps).map_err(err)?.value;
        let profh = composite_profile(&UnivariateLoss::Hinge, &[Some(1.0)], 0.0, &theta, norm, &atoms, 1);
        min_slack = min_slack.min(lipschitz_bound(&profh, w, 1, eps).map_err(err)?.total - exacth);
        checked += 3;
    }
    ensure(min_slack >= -1e-9, || format!("bound below exact by {:.2e}", -min_slack))?;

    let mut worst_ratio = 0.0f64;
    for (loss, m) in [
        (UnivariateLoss::SmoothCustom(SmoothLoss::logistic()), 0.25),
        (UnivariateLoss::SmoothCustom(SmoothLoss::quadratic_poly(0.5, -0.3, 0.1)), 1.0),
    ] {
        for _ in 0..5 {
            let theta: Vec<f64> = (0..2).map(|_| rng.random_range(-1.5..1.5)).collect();
            let atoms: Vec<Vec<f64>> = (0..3).map(|_| (0..2).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
            let dist = DiscreteDistribution::uniform(atoms.clone()).map_err(|e| e.to_string())?;
            let prof = composite_profile(&loss, &[None, Some(m)], 0.0, &theta, Norm::Two, &atoms, 2);
            let r = 1e-4;
            let bound = wasserstein_bound(&prof, dist.weights(), 2, r, WassersteinVariant::Variation).map_err(|e| e.to_string())?.total;
            let exact = dro_value_via_envelope(&loss, Norm::Two, 2, &theta, &dist, r * r).map_err(|e| e.to_string())?.value;
            min_slack = min_slack.min(bound - exact);
            worst_ratio = worst_ratio.max((bound - exact) / r);
        }
    }
    ensure(min_slack >= -1e-9, || format!("bound below exact by {:.2e}", -min_slack))?;
    ensure(worst_ratio <= 0.05, || format!("tightness ratio {worst_ratio:.3}"))?;
    Ok(format!("eps^2/2 = {:.3e} vs exact 0; {checked} soundness checks, min slack {min_slack:.1e}; tightness ratio {worst_ratio:.1e}", b.total))
}

fn portfolio_experiment() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig::with_defaults(10, 100, 100_000, 50, 0);
    let rows = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let summary = summarize(&rows);
    let saa = summary.iter().find(|s| s.eps == 0.0).ok_or("grid lacks eps = 0")?;
    let best = summary.iter().min_by(|a, b| a.mean_loss.total_cmp(&b.mean_loss)).unwrap();
    ensure(best.eps > 0.0, || "minimum at eps = 0".into())?;
    // Paired standard error of the per-trial difference to SAA.
    ensure(-best.mean_diff >= best.se_diff, || format!("improvement {:.2e} below one SE {:.2e}", -best.mean_diff, best.se_diff))?;
    ensure(secs < 600.0, || format!("{secs:.0}s"))?;
    Ok(format!(
        "min at eps = {} ({:.5} vs SAA {:.5}), improvement {:.2e} = {:.1} paired SE (unpaired SE {:.1e}), {secs:.1}s",
        best.eps,
        best.mean_loss,
        saa.mean_loss,
        -best.mean_diff,
        -best.mean_diff / best.se_diff,
        best.se_loss
    ))
}

fn solver_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let opts = SolveOptions::default();
    let (mut gap, mut saa_gap) = (0.0f64, 0.0f64);
    for i in 0..20 {
        let d = 2 + i % 9;
        let samples: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..d).map(|k| LogNormal::new(0.03 * k as f64, 0.5).unwrap().sample(&mut rng)).collect())
            .collect();
        let eps = rng.random_range(0.001..0.3);
        let problem = PortfolioProblem::uniform(samples, eps).map_err(|e| e.to_string())?;
        let a = solve_portfolio(&problem, "graal", &opts).map_err(|e| format!("graal: {e}"))?;
        let b = solve_portfolio(&problem, "projected_gradient", &opts).map_err(|e| format!("pg: {e}"))?;
        gap = gap.max((a.value - b.value).abs());
        let tiny = problem.with_eps(1e-10).map_err(|e| e.to_string())?;
        let dro = solve_portfolio(&tiny, "graal", &opts).map_err(|e| e.to_string())?;
        let (_, saa) = solve_saa(&tiny, &opts).map_err(|e| e.to_string())?;
        saa_gap = saa_gap.max((dro.value - saa).abs());
    }
    ensure(gap <= 1e-5, || format!("solver gap {gap:.2e}"))?;
    ensure(saa_gap <= 1e-5, || format!("SAA gap {saa_gap:.2e}"))?;
    Ok(format!("graal vs projected gradient {gap:.1e}, eps -> 0 vs SAA {saa_gap:.1e}"))
}

fn small_instance_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let grid: Vec<f64> = (0..=800).map(|i| -8.0 + 16.0 * i as f64 / 800.0).collect();
    let cases: Vec<(UnivariateLoss, u32)> = vec![
        (UnivariateLoss::Quadratic, 2),
        (UnivariateLoss::Hinge, 1),
        (UnivariateLoss::Hinge, 2),
        (UnivariateLoss::ZeroOne, 2),
        (UnivariateLoss::SmoothCustom(SmoothLoss::logistic()), 2),
    ];
    let mut worst = 0.0f64;
    let mut count = 0;
    for _ in 0..6 {
        let n = rng.random_range(1..4);
        let atoms: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
        let w = random_simplex(&mut rng, n);
        let theta = rng.random_range(0.3..1.5);
        let eps = rng.random_range(0.05..0.5);
        let dist = DiscreteDistribution::new(atoms.iter().map(|a| vec![*a]).collect(), w.clone()).map_err(|e| e.to_string())?;
        let mut g = grid.clone();
        g.extend(&atoms);
        g.push(0.0);
        g.sort_by(f64::total_cmp);
        for (loss, p) in &cases {
            let r = dro_value_via_envelope(loss, Norm::Two, *p, &[theta], &dist, eps).map_err(|e| e.to_string())?;
            let lp = grid_worst_case(|x| loss.eval(x), theta, &atoms, &w, *p as i32, eps, &g);
            worst = worst.max((r.value - lp).abs() / r.value.abs().max(1e-12));
            count += 1;
        }
    }
    ensure(worst <= 0.02, || format!("relative gap {worst:.3}"))?;
    Ok(format!("{count} instances, max relative gap {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("SVM strong duality", svm_strong_duality),
        ("Nash saddle", nash_saddle),
        ("transport feasibility", transport_feasibility),
        ("portfolio c-transform", portfolio_ctransform_checks),
        ("envelope exactness", envelope_exactness),
        ("quadratic-loss closed form", quadratic_closed_form),
        ("regularization bounds", regularization_bounds),
        ("portfolio experiment", portfolio_experiment),
        ("solver cross-validation", solver_cross_validation),
        ("small-instance worst-case oracle", small_instance_oracle),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
