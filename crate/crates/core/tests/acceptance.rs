//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use stochvi::harness::{game_experiment, run_experiment, ExperimentConfig, Method, ProblemKind};
use stochvi::problems::{project_simplex, MatrixGame, PayoffNoise, QuadraticSaddle, QuadraticVi};
use stochvi::rng;
use stochvi::schemes::{
    check_extra_momentum_conditions, check_extra_point_conditions, default_extra_momentum_params,
    default_extra_point_params, extra_momentum_noise_floor, first_potential_violation,
    run_first_order, theoretical_bound_extra_point, ExtraMomentumParams, ExtraPointParams,
    RunConfig, SchemeParams, DEFAULT_THETA, EM_DISPLACEMENT, EM_MONOTONICITY, EM_NONNEGATIVE,
    EM_RATIO, EM_THETA_RANGE, EP_ETA_EQUALS_ALPHA, EP_NONNEGATIVE, EP_STEP_BUDGET, EP_T2_MARGIN,
};
use stochvi::vi::{Ball, EuclideanSpace, Mapping};
use stochvi::zeroth_order::{
    batched_zeroth_order_gradient, sigma_tilde_for, total_samples,
    closed_form_total_samples, zeroth_order_gradient, ScheduleVariant,
    SmoothingParams,
};
use stochvi::{Point, Result};

type Outcome = Result<(bool, String)>;

fn unit_direction(dim: usize, scale: f64, r: &mut rng::StreamRng) -> Point {
    let v = DVector::from_fn(dim, |_, _| r.sample::<f64, _>(rand_distr::StandardNormal));
    &v * (scale / v.norm())
}

fn deterministic_quadratic(kappa: f64, seed: u64) -> Result<stochvi::vi::ViProblem> {
    let mut r = rng::stream(seed, rng::PROBLEM_STREAM);
    let z_star = unit_direction(10, 1.0, &mut r);
    let q = QuadraticVi::random_skew(10, kappa, z_star, &mut r)?;
    q.problem(Arc::new(EuclideanSpace::new(10)), 0.0)
}

/// Smallest squared distance to `z*` that double precision can resolve:
/// once the bound drops below it the iterate sits on `z*` up to rounding.
fn roundoff_floor(vi: &stochvi::vi::ViProblem) -> f64 {
    let z_star = vi.reference_solution.as_ref().expect("reference solution");
    z_star.len() as f64 * (f64::EPSILON * z_star.amax().max(1.0)).powi(2)
}

fn c1_extra_point_bound() -> Outcome {
    let mut worst = 0.0_f64;
    for (i, &kappa) in [1.0, 10.0, 100.0].iter().enumerate() {
        let vi = deterministic_quadratic(kappa, 100 + i as u64)?;
        let params = SchemeParams::ExtraPoint(default_extra_point_params(vi.modulus, vi.lipschitz));
        let resolution = roundoff_floor(&vi);
        let trace = run_first_order(&vi, &params, &RunConfig::new(Point::zeros(10), 2000, 1, 1))?;
        let d = trace.mean_distances.expect("distances");
        for (k, dk) in d.iter().enumerate() {
            let b = theoretical_bound_extra_point(k, d[0], kappa, 0.0, 0.0, vi.diameter(), vi.lipschitz)
                .max(resolution);
            worst = worst.max(dk / b);
            if *dk > b {
                return Ok((false, format!("kappa={kappa}: d_{k}={dk:e} > bound {b:e}")));
            }
        }
    }
    Ok((true, format!("max d_k/bound = {worst:.3e}")))
}

fn c2_extra_momentum_bound() -> Outcome {
    let mut worst = 0.0_f64;
    for (i, &kappa) in [1.0, 10.0, 100.0].iter().enumerate() {
        let vi = deterministic_quadratic(kappa, 200 + i as u64)?;
        let p = default_extra_momentum_params(vi.modulus, vi.lipschitz, DEFAULT_THETA);
        let trace = run_first_order(
            &vi,
            &SchemeParams::ExtraMomentum(p),
            &RunConfig::new(Point::zeros(10), 2000, 1, 1),
        )?;
        let d = trace.mean_distances.expect("distances");
        let rate = 1.0 - 1.0 / (8.0 * kappa + 1.0);
        let resolution = roundoff_floor(&vi);
        for (k, dk) in d.iter().enumerate() {
            let b = (2.0 * rate.powi(k as i32) * d[0]).max(resolution);
            worst = worst.max(dk / b);
            if *dk > b {
                return Ok((false, format!("kappa={kappa}: d_{k}={dk:e} > {b:e}")));
            }
        }
        let v = trace.mean_potentials.expect("potentials");
        // V mixes products of O(ε)-accurate differences; stop checking once
        // the error is within a thousand ulps of z*
        let resolved = v
            .iter()
            .position(|x| x.abs() <= 1e6 * resolution)
            .unwrap_or(v.len());
        if let Some(k) = first_potential_violation(&v[..resolved], 1.0 + p.theta / kappa, 1e-9) {
            return Ok((false, format!("kappa={kappa}: potential recursion fails at k={k}: V={:e}, {:e}", v[k], v[k + 1])));
        }
    }
    Ok((true, format!("max d_k/bound = {worst:.3e}, potential recursion holds")))
}

fn c3_noise_floor() -> Outcome {
    let (kappa, sigma2, reps) = (2.0, 0.5, 64);
    let mut r = rng::stream(3, rng::PROBLEM_STREAM);
    let z_star = unit_direction(10, 1.0, &mut r);
    let q = QuadraticVi::random_skew(10, kappa, z_star, &mut r)?;
    let vi = q.problem(Arc::new(EuclideanSpace::new(10)), sigma2)?;
    let p = default_extra_momentum_params(vi.modulus, vi.lipschitz, DEFAULT_THETA);
    let trace = run_first_order(
        &vi,
        &SchemeParams::ExtraMomentum(p),
        &RunConfig::new(Point::zeros(10), 1000, reps, 3),
    )?;
    // per-replication window averages, then their mean and standard error
    let window: Vec<f64> = trace
        .replications
        .iter()
        .map(|rep| {
            let d = rep.distances.as_ref().expect("distances");
            d[500..=1000].iter().sum::<f64>() / 501.0
        })
        .collect();
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let se = (window.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
    let floor = extra_momentum_noise_floor(vi.modulus, vi.lipschitz, sigma2, 0.0);
    Ok((
        mean - 3.0 * se <= floor,
        format!("plateau {mean:.4e} (se {se:.1e}) vs floor {floor:.4e}"),
    ))
}

fn c4_estimator() -> Outcome {
    let (n, m) = (5, 5);
    let mut r = rng::stream(4, rng::PROBLEM_STREAM);
    let a = DMatrix::from_fn(n, m, |_, _| r.sample::<f64, _>(rand_distr::StandardNormal));
    let saddle = QuadraticSaddle::new(1.0, 1.0, a, Point::zeros(n), Point::zeros(m), 0.2, 2.0)?;
    let z = unit_direction(n + m, 1.0, &mut r);
    let s = SmoothingParams::new(0.05, 0.05)?;
    let truth = saddle.operator().evaluate(&z);
    let st2 = sigma_tilde_for(&saddle, &s);

    let draws = 1_000_000;
    let mut sum = Point::zeros(n + m);
    let mut sum_sq = Point::zeros(n + m);
    let mut rr = rng::stream(4, 0);
    let mut samples = Vec::with_capacity(draws);
    for _ in 0..draws {
        let g = zeroth_order_gradient(&saddle, &z, &s, &mut rr)?;
        sum += &g;
        sum_sq += g.component_mul(&g);
        samples.push(g);
    }
    let nd = draws as f64;
    let mean = &sum / nd;
    let mut worst_z = 0.0_f64;
    for i in 0..n + m {
        let var = sum_sq[i] / nd - mean[i] * mean[i];
        let se = (var / nd).sqrt();
        worst_z = worst_z.max((mean[i] - truth[i]).abs() / se);
    }
    let (mut mx, mut my) = (0.0, 0.0);
    for g in &samples {
        let d = g - &mean;
        mx += d.rows(0, n).norm_squared();
        my += d.rows(n, m).norm_squared();
    }
    let (mx, my) = (mx / nd, my / nd);
    drop(samples);

    let mut batch_ok = true;
    let mut batch_detail = Vec::new();
    for t in [1_u64, 10, 100] {
        let batches = 4000;
        let mut acc = 0.0;
        for _ in 0..batches {
            let e = batched_zeroth_order_gradient(&saddle, &z, &s, t, &mut rr)?;
            acc += (e.value - &truth).norm_squared();
        }
        let v = acc / batches as f64;
        let cap = 2.0 * st2 / t as f64;
        batch_ok &= v <= cap;
        batch_detail.push(format!("t={t}: {v:.3e}<={cap:.3e}"));
    }
    let ok = worst_z <= 4.0 && mx <= st2 && my <= st2 && batch_ok;
    Ok((
        ok,
        format!(
            "max |z|={worst_z:.2}, block moments ({mx:.3e}, {my:.3e}) <= {st2:.3e}, {}",
            batch_detail.join(", ")
        ),
    ))
}

fn c5_schedule() -> Outcome {
    let base = total_samples(ScheduleVariant::ExtraPoint, 2, 1.0)?;
    if base != 12 {
        return Ok((false, format!("total_samples(kappa=1, K=2) = {base}")));
    }
    let mut worst = 0.0_f64;
    for kappa in [1.0, 10.0, 100.0] {
        for k in [10, 100] {
            let exact = total_samples(ScheduleVariant::ExtraPoint, k, kappa)? as f64;
            let closed = closed_form_total_samples(ScheduleVariant::ExtraPoint, k, kappa);
            let gap = exact - closed;
            worst = worst.max(gap / (2.0 * k as f64));
            if !(gap >= -1e-6 * closed && gap <= 2.0 * k as f64) {
                return Ok((false, format!("kappa={kappa}, K={k}: gap {gap}")));
            }
        }
    }
    Ok((true, format!("K=2 total 12; max gap/(2K) = {worst:.3}")))
}

fn log_slope(values: &[f64], from: usize, to: usize) -> f64 {
    let pts: Vec<(f64, f64)> = (from..=to).map(|k| (k as f64, values[k].ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn c6_zeroth_order_trend() -> Outcome {
    let mut c = ExperimentConfig {
        seed: Some(6),
        replications: 10,
        iters: Some(60),
        method: Method::SzoExtraPoint,
        ..ExperimentConfig::default()
    };
    c.problem.kind = ProblemKind::Synthetic;
    c.problem.n = 5;
    c.problem.m = 5;
    c.problem.kappa = 5.0;
    c.problem.sigma2 = 0.1;
    let run = run_experiment(&c)?;
    let d: Vec<f64> = run.rows.iter().map(|r| r.mean_dist_sq).collect();
    let slope = log_slope(&d, 10, 60);
    let target = -0.5 / (256.0 * run.summary.kappa);
    Ok((slope <= target, format!("slope {slope:.4e} vs {target:.4e}")))
}

fn c7_game() -> Outcome {
    let mut c = ExperimentConfig {
        seed: Some(7),
        replications: 10,
        ..ExperimentConfig::default()
    };
    c.problem.kind = ProblemKind::GameNormal;
    c.problem.n = 10;
    c.problem.m = 20;
    c.problem.lambda = 1.0;
    c.problem.sigma2 = 0.5;
    let exp = game_experiment(&c)?;
    let d0 = exp.runs[0].summary.d0;
    let finals: Vec<(Method, f64)> = exp
        .runs
        .iter()
        .map(|r| (r.method, r.summary.final_mean_dist_sq))
        .collect();
    let eg = finals.iter().find(|f| f.0 == Method::ExtraGradient).expect("baseline").1;
    let reduced = finals.iter().all(|f| f.1 <= d0 / 100.0);
    let comparable = finals
        .iter()
        .filter(|f| matches!(f.0, Method::SzoExtraPoint | Method::SzoExtraMomentum))
        .all(|f| f.1 <= 5.0 * eg && f.1 >= eg / 5.0);
    let detail = finals
        .iter()
        .map(|(m, v)| format!("{m}: d0/d_K={:.0}", d0 / v))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((
        reduced && comparable,
        format!("kappa={:.1}, K={}, {detail}", exp.kappa, exp.horizon),
    ))
}

fn c8_sublinear() -> Outcome {
    let mut r = rng::stream(8, rng::PROBLEM_STREAM);
    let z_star = unit_direction(10, 0.5, &mut r);
    let q = QuadraticVi::random_skew(10, 2.0, z_star, &mut r)?;
    let vi = q.problem(Arc::new(Ball::unit(10)), 0.5)?;
    let z0 = -unit_direction(10, 1.0, &mut r);
    let trace = run_first_order(
        &vi,
        &SchemeParams::DiminishingExtraPoint,
        &RunConfig::new(z0, 1000, 50, 8),
    )?;
    let d = trace.mean_distances.expect("distances");
    let scaled: Vec<f64> = (10..=1000).map(|k| (k as f64 + 2.0) * d[k]).collect();
    let max = scaled.iter().copied().fold(0.0, f64::max);
    Ok((
        max <= 2.0 * scaled[0],
        format!("max (k+2)E[d_k] = {max:.4e}, 2x value at k=10 = {:.4e}", 2.0 * scaled[0]),
    ))
}

/// Minimises `‖x - v‖²` over the simplex by trying every support.
fn brute_force_simplex(v: &Point) -> Point {
    let d = v.len();
    let mut best = (f64::INFINITY, Point::zeros(d));
    for mask in 1u32..(1 << d) {
        let idx: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
        let theta = (idx.iter().map(|&i| v[i]).sum::<f64>() - 1.0) / idx.len() as f64;
        let mut x = Point::zeros(d);
        for &i in &idx {
            x[i] = v[i] - theta;
        }
        if x.iter().any(|&xi| xi < 0.0) {
            continue;
        }
        let obj = (&x - v).norm_squared();
        if obj < best.0 {
            best = (obj, x);
        }
    }
    best.1
}

fn c9_oracles() -> Outcome {
    let mut r = rng::stream(9, 0);
    let mut worst_proj = 0.0_f64;
    for _ in 0..1000 {
        let d = r.random_range(1..=12);
        let v = DVector::from_fn(d, |_, _| r.random_range(-2.0..2.0));
        worst_proj = worst_proj.max((project_simplex(&v) - brute_force_simplex(&v)).amax());
    }
    let mut worst_cond = 0.0_f64;
    for _ in 0..100 {
        let n = 2 * r.random_range(1..=6);
        let m = 2 * r.random_range(1..=6);
        let a0 = DMatrix::from_fn(n, m, |_, _| r.random_range(-30.0..30.0));
        let lx = r.random_range(0.1..3.0);
        let ly = r.random_range(0.1..3.0);
        let game = MatrixGame::new(a0, lx, ly, 0.5, PayoffNoise::Normal)?;
        let c = game.condition_number()?;
        let sv = game.jacobian().singular_values();
        let (hi, lo) = (sv.max(), sv.min());
        for (got, want) in [(c.lipschitz, hi), (c.mu, lo), (c.kappa, hi / lo)] {
            worst_cond = worst_cond.max((got - want).abs() / want);
        }
    }
    Ok((
        worst_proj <= 1e-8 && worst_cond <= 1e-8,
        format!("projection error {worst_proj:.1e}, condition rel. error {worst_cond:.1e}"),
    ))
}

fn c10_truth_table() -> Outcome {
    let kappas = [1.0, 2.0, 10.0, 161.0, 1e3];
    for &kappa in &kappas {
        let (mu, l) = (1.0, kappa);
        let ep = default_extra_point_params(mu, l);
        let v = check_extra_point_conditions(&ep, mu, l);
        if !v.valid {
            return Ok((false, format!("extra-point defaults invalid at kappa={kappa}: {:?}", v.violated)));
        }
        let em = default_extra_momentum_params(mu, l, DEFAULT_THETA);
        let v = check_extra_momentum_conditions(&em, mu, l);
        if !v.valid {
            return Ok((false, format!("extra-momentum defaults invalid at kappa={kappa}: {:?}", v.violated)));
        }

        let ep_cases: [(ExtraPointParams, &str); 5] = [
            (ExtraPointParams { tau: ep.tau * 10.0, ..ep }, EP_T2_MARGIN),
            (ExtraPointParams { eta: ep.eta * 0.5, ..ep }, EP_ETA_EQUALS_ALPHA),
            (ExtraPointParams { beta: -ep.beta, ..ep }, EP_NONNEGATIVE),
            (ExtraPointParams { alpha: ep.alpha * 4.0, eta: ep.eta * 4.0, ..ep }, EP_STEP_BUDGET),
            (ExtraPointParams { beta: ep.beta + 0.5, ..ep }, EP_STEP_BUDGET),
        ];
        for (p, name) in ep_cases {
            let v = check_extra_point_conditions(&p, mu, l);
            if v.valid || !v.violated.contains(&name) {
                return Ok((false, format!("kappa={kappa}: expected `{name}`, got {:?}", v.violated)));
            }
        }
        let em_cases: [(ExtraMomentumParams, &str); 5] = [
            (ExtraMomentumParams { tau: em.tau * 10.0, ..em }, EM_RATIO),
            (ExtraMomentumParams { theta: 2.0, ..em }, EM_THETA_RANGE),
            (ExtraMomentumParams { gamma: em.gamma * 10.0, ..em }, EM_MONOTONICITY),
            (ExtraMomentumParams { alpha: -em.alpha, ..em }, EM_NONNEGATIVE),
            (
                ExtraMomentumParams { alpha: em.alpha * 3.0, tau: em.tau * 3.0, ..em },
                EM_DISPLACEMENT,
            ),
        ];
        for (p, name) in em_cases {
            let v = check_extra_momentum_conditions(&p, mu, l);
            if v.valid || !v.violated.contains(&name) {
                return Ok((false, format!("kappa={kappa}: expected `{name}`, got {:?}", v.violated)));
            }
        }
    }
    Ok((true, "defaults valid at 5 condition numbers; 10 perturbations flip each".into()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("extra-point bound dominance", c1_extra_point_bound, 10),
        ("extra-momentum bound and potential recursion", c2_extra_momentum_bound, 10),
        ("extra-momentum noise floor", c3_noise_floor, 60),
        ("zeroth-order estimator moments", c4_estimator, 60),
        ("batch schedule arithmetic", c5_schedule, 1),
        ("zeroth-order linear trend", c6_zeroth_order_trend, 300),
        ("matrix game comparison", c7_game, 600),
        ("diminishing-step sublinear rate", c8_sublinear, 120),
        ("projection and condition-number oracles", c9_oracles, 30),
        ("condition-checker truth table", c10_truth_table, 1),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {:>2}: {name} ({detail}; {:.2}s of {limit}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
