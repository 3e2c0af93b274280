//! Empirical checks of the assumptions the convergence theory relies on.

use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::vi::oracle::{Mapping, StochasticOracle};
use crate::vi::sets::{gaussian_vector, FeasibleSet};
use crate::Point;

/// Relative slack allowed on the declared modulus / Lipschitz constant.
pub const CONSTANT_SLACK: f64 = 1e-9;
/// Width of the confidence band used by Monte-Carlo contract checks.
pub const STANDARD_ERRORS: f64 = 3.0;

#[derive(Debug, Clone, Copy)]
pub struct MonotonicityReport {
    pub min_observed_ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct LipschitzReport {
    pub max_observed_ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ProjectionReport {
    pub max_idempotence_error: f64,
    /// Smallest value of `<P(a)-P(b), a-b> - ||P(a)-P(b)||²`, normalised by `||a-b||²`.
    pub min_cocoercivity_slack: f64,
    pub max_pair_distance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ProbeEstimate {
    pub bias_hat: f64,
    pub bias_se: f64,
    pub var_hat: f64,
    pub var_se: f64,
}

#[derive(Debug, Clone)]
pub struct OracleContractReport {
    pub max_bias_hat: f64,
    pub max_var_hat: f64,
    pub probes: Vec<ProbeEstimate>,
    pub pass: bool,
}

fn distinct_pair(set: &dyn FeasibleSet, rng: &mut StreamRng) -> (Point, Point) {
    loop {
        let a = set.sample_point(rng);
        let b = set.sample_point(rng);
        if (&a - &b).norm_squared() > 0.0 {
            return (a, b);
        }
    }
}

/// Minimum of `(F(z)-F(z'))ᵀ(z-z') / ||z-z'||²` over random pairs of the set.
pub fn verify_monotonicity(
    mapping: &dyn Mapping,
    set: &dyn FeasibleSet,
    num_probes: usize,
    rng: &mut StreamRng,
) -> Result<MonotonicityReport> {
    if num_probes == 0 {
        return Err(Error::invalid("num_probes must be at least 1"));
    }
    let mut min_ratio = f64::INFINITY;
    for _ in 0..num_probes {
        let (a, b) = distinct_pair(set, rng);
        let dz = &a - &b;
        let df = mapping.evaluate(&a) - mapping.evaluate(&b);
        min_ratio = min_ratio.min(df.dot(&dz) / dz.norm_squared());
    }
    Ok(MonotonicityReport {
        min_observed_ratio: min_ratio,
        pass: min_ratio >= mapping.modulus() * (1.0 - CONSTANT_SLACK),
    })
}

/// Maximum of `||F(z)-F(z')|| / ||z-z'||` over random pairs of the set.
pub fn verify_lipschitz(
    mapping: &dyn Mapping,
    set: &dyn FeasibleSet,
    num_probes: usize,
    rng: &mut StreamRng,
) -> Result<LipschitzReport> {
    if num_probes == 0 {
        return Err(Error::invalid("num_probes must be at least 1"));
    }
    let mut max_ratio = 0.0_f64;
    for _ in 0..num_probes {
        let (a, b) = distinct_pair(set, rng);
        let dz = &a - &b;
        let df = mapping.evaluate(&a) - mapping.evaluate(&b);
        max_ratio = max_ratio.max(df.norm() / dz.norm());
    }
    Ok(LipschitzReport {
        max_observed_ratio: max_ratio,
        pass: max_ratio <= mapping.lipschitz() * (1.0 + CONSTANT_SLACK),
    })
}

/// Idempotence, 1-co-coercivity and the diameter bound on random pairs of
/// points drawn around the set (most of them outside it).
pub fn verify_projection(
    set: &dyn FeasibleSet,
    num_pairs: usize,
    rng: &mut StreamRng,
) -> ProjectionReport {
    const TOL: f64 = 1e-10;
    let spread = if set.diameter().is_finite() {
        set.diameter()
    } else {
        1.0
    };
    let mut worst_idem = 0.0_f64;
    let mut worst_slack = f64::INFINITY;
    let mut max_dist = 0.0_f64;
    let mut pass = true;
    for _ in 0..num_pairs {
        let a = set.sample_point(rng) + gaussian_vector(set.dim(), rng) * spread;
        let b = set.sample_point(rng) + gaussian_vector(set.dim(), rng) * spread;
        let pa = set.project(&a);
        let pb = set.project(&b);

        let idem = (set.project(&pa) - &pa).norm() / pa.norm().max(1.0);
        worst_idem = worst_idem.max(idem);

        let dp = &pa - &pb;
        let dz = &a - &b;
        let scale = dz.norm_squared().max(f64::MIN_POSITIVE);
        let slack = (dp.dot(&dz) - dp.norm_squared()) / scale;
        worst_slack = worst_slack.min(slack);

        let dist = dp.norm();
        max_dist = max_dist.max(dist);

        if idem > TOL || slack < -TOL || dist > set.diameter() * (1.0 + TOL) {
            pass = false;
        }
    }
    ProjectionReport {
        max_idempotence_error: worst_idem,
        min_cocoercivity_slack: worst_slack,
        max_pair_distance: max_dist,
        pass,
    }
}

/// Monte-Carlo estimates of `E||F̂ - F||` and `E||F̂ - F||²` at each probe
/// point. Passes when every estimate is within its declared bound plus three
/// standard errors.
pub fn verify_oracle_contract(
    oracle: &dyn StochasticOracle,
    probe_points: &[Point],
    samples_per_point: usize,
    rng: &mut StreamRng,
) -> Result<OracleContractReport> {
    if samples_per_point < 100 {
        return Err(Error::invalid("samples_per_point must be at least 100"));
    }
    let mapping = oracle.mean_mapping().ok_or(Error::MissingMapping)?;
    let delta = oracle.declared_bias();
    let sigma2 = oracle.declared_variance();
    let s = samples_per_point as f64;

    let mut probes = Vec::with_capacity(probe_points.len());
    let mut pass = true;
    for z in probe_points {
        let exact = mapping.evaluate(z);
        let (mut sum1, mut sum1_sq, mut sum2, mut sum2_sq) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..samples_per_point {
            let e2 = (oracle.sample(z, rng)? - &exact).norm_squared();
            let e1 = e2.sqrt();
            sum1 += e1;
            sum1_sq += e1 * e1;
            sum2 += e2;
            sum2_sq += e2 * e2;
        }
        let bias_hat = sum1 / s;
        let var_hat = sum2 / s;
        let bias_se = ((sum1_sq / s - bias_hat * bias_hat).max(0.0) / s).sqrt();
        let var_se = ((sum2_sq / s - var_hat * var_hat).max(0.0) / s).sqrt();
        if bias_hat > delta + STANDARD_ERRORS * bias_se
            || var_hat > sigma2 + STANDARD_ERRORS * var_se
        {
            pass = false;
        }
        probes.push(ProbeEstimate {
            bias_hat,
            bias_se,
            var_hat,
            var_se,
        });
    }
    Ok(OracleContractReport {
        max_bias_hat: probes.iter().map(|p| p.bias_hat).fold(0.0, f64::max),
        max_var_hat: probes.iter().map(|p| p.var_hat).fold(0.0, f64::max),
        probes,
        pass,
    })
}

/// Smallest `F(z*)ᵀ(z - z*)` over random feasible `z`; a solution has this
/// nonnegative up to `tol`.
pub fn verify_solution(
    mapping: &dyn Mapping,
    set: &dyn FeasibleSet,
    candidate: &Point,
    num_probes: usize,
    tol: f64,
    rng: &mut StreamRng,
) -> (f64, bool) {
    let f_star = mapping.evaluate(candidate);
    let worst = (0..num_probes)
        .map(|_| f_star.dot(&(set.sample_point(rng) - candidate)))
        .fold(f64::INFINITY, f64::min);
    (worst, worst >= -tol)
}
