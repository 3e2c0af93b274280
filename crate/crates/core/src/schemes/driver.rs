//! Replicated solver runs and their traces.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;
use crate::schemes::bounds::potential;
use crate::schemes::params::{
    check_extra_momentum_conditions, check_extra_point_conditions, diminishing_extra_point_params,
    ExtraMomentumParams, ExtraPointParams,
};
use crate::schemes::step::{
    extra_momentum_step, extra_point_step, DirectionOracle, FirstOrder, SolverState,
};
use crate::vi::ViProblem;
use crate::Point;

/// Which update rule to run and with what parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeParams {
    ExtraPoint(ExtraPointParams),
    ExtraMomentum(ExtraMomentumParams),
    /// Extra-point with step sizes `2/((k+2)μ)`; covered by its own
    /// sublinear analysis rather than the constant-step conditions.
    DiminishingExtraPoint,
}

impl SchemeParams {
    /// Checks the constant-step conditions against `(mu, L)`. Returns the
    /// names of all violated inequalities.
    pub fn validate(&self, mu: f64, lipschitz: f64) -> Result<()> {
        let violated = match self {
            SchemeParams::ExtraPoint(p) => check_extra_point_conditions(p, mu, lipschitz).violated,
            SchemeParams::ExtraMomentum(p) => {
                check_extra_momentum_conditions(p, mu, lipschitz).violated
            }
            SchemeParams::DiminishingExtraPoint => Vec::new(),
        };
        if violated.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation {
                violated: violated.into_iter().map(String::from).collect(),
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub z0: Point,
    pub iterations: usize,
    pub replications: usize,
    pub seed: u64,
    /// Run even when the parameters fail validation (baselines need this).
    pub override_validation: bool,
    /// Keep every iterate of every replication.
    pub record_iterates: bool,
}

impl RunConfig {
    pub fn new(z0: Point, iterations: usize, replications: usize, seed: u64) -> Self {
        RunConfig {
            z0,
            iterations,
            replications,
            seed,
            override_validation: false,
            record_iterates: false,
        }
    }

    pub fn override_validation(mut self, yes: bool) -> Self {
        self.override_validation = yes;
        self
    }

    pub fn record_iterates(mut self, yes: bool) -> Self {
        self.record_iterates = yes;
        self
    }
}

/// One replication. Vectors indexed by `k = 0..=K` unless noted.
#[derive(Debug, Clone)]
pub struct ReplicationTrace {
    pub distances: Option<Vec<f64>>,
    /// `V_k` for `k = 0..K`; extra-momentum runs with a known solution only.
    pub potentials: Option<Vec<f64>>,
    pub iterates: Option<Vec<Point>>,
    pub iterate_norms: Vec<f64>,
    /// `‖z^k - z^{k-1}‖`, zero at `k = 0`.
    pub step_lengths: Vec<f64>,
    pub cumulative_samples: Vec<u64>,
    pub cumulative_evaluations: Vec<u64>,
    pub warmup_samples: u64,
    /// Seconds since the start of the replication.
    pub wall_time: Vec<f64>,
    pub final_iterate: Point,
}

#[derive(Debug, Clone)]
pub struct SolverTrace {
    pub iterations: usize,
    pub replications: Vec<ReplicationTrace>,
    /// `E[d_k]` as the mean over replications.
    pub mean_distances: Option<Vec<f64>>,
    pub mean_potentials: Option<Vec<f64>>,
}

impl SolverTrace {
    /// Sample counts of the first replication; every replication uses the
    /// same deterministic schedule.
    pub fn cumulative_samples(&self) -> &[u64] {
        &self.replications[0].cumulative_samples
    }

    pub fn cumulative_evaluations(&self) -> &[u64] {
        &self.replications[0].cumulative_evaluations
    }

    pub fn warmup_samples(&self) -> u64 {
        self.replications[0].warmup_samples
    }

    pub fn final_mean_distance(&self) -> Option<f64> {
        self.mean_distances.as_ref().and_then(|d| d.last().copied())
    }

    /// Per-replication `d_K`.
    pub fn final_distances(&self) -> Option<Vec<f64>> {
        self.replications
            .iter()
            .map(|r| r.distances.as_ref().and_then(|d| d.last().copied()))
            .collect()
    }
}

/// Runs the scheme with `problem.oracle` sampled once per evaluation.
pub fn run_first_order(
    problem: &ViProblem,
    params: &SchemeParams,
    config: &RunConfig,
) -> Result<SolverTrace> {
    run_solver(problem, &FirstOrder(problem.oracle.clone()), params, config)
}

/// Runs `config.replications` independent replications; replication `r`
/// draws from stream `r` of `config.seed`. Runs on the current rayon pool and
/// joins in replication order, so the result does not depend on the number of
/// threads.
pub fn run_solver(
    problem: &ViProblem,
    oracle: &dyn DirectionOracle,
    params: &SchemeParams,
    config: &RunConfig,
) -> Result<SolverTrace> {
    if config.replications == 0 {
        return Err(Error::invalid("replications must be at least 1"));
    }
    if config.z0.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            found: config.z0.len(),
        });
    }
    if !config.override_validation {
        params.validate(problem.modulus, problem.lipschitz)?;
    }
    let replications: Vec<ReplicationTrace> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            run_replication(problem, oracle, params, config, r).map_err(|e| Error::Replication {
                replication: r,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mean_distances = mean_columns(replications.iter().map(|r| r.distances.as_deref()));
    let mean_potentials = mean_columns(replications.iter().map(|r| r.potentials.as_deref()));
    Ok(SolverTrace {
        iterations: config.iterations,
        replications,
        mean_distances,
        mean_potentials,
    })
}

fn mean_columns<'a>(rows: impl Iterator<Item = Option<&'a [f64]>>) -> Option<Vec<f64>> {
    let rows: Option<Vec<&[f64]>> = rows.collect();
    let rows = rows?;
    let n = rows.len() as f64;
    let len = rows.first()?.len();
    Some(
        (0..len)
            .map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / n)
            .collect(),
    )
}

fn run_replication(
    problem: &ViProblem,
    oracle: &dyn DirectionOracle,
    params: &SchemeParams,
    config: &RunConfig,
    index: usize,
) -> Result<ReplicationTrace> {
    let start = Instant::now();
    let set = problem.set.as_ref();
    let z_star = problem.reference_solution.as_ref();
    let mut rng = rng::replication(config.seed, index);
    let mut state = SolverState::initialize(&config.z0, set, oracle, &mut rng)?;

    let k_max = config.iterations;
    let cap = k_max + 1;
    let mut distances = z_star.map(|_| Vec::with_capacity(cap));
    let track_potential = matches!(params, SchemeParams::ExtraMomentum(_)) && z_star.is_some();
    let mut potentials = track_potential.then(|| Vec::with_capacity(k_max));
    let mut iterates = config.record_iterates.then(|| Vec::with_capacity(cap));
    let mut iterate_norms = Vec::with_capacity(cap);
    let mut step_lengths = Vec::with_capacity(cap);
    let mut cumulative_samples = Vec::with_capacity(cap);
    let mut cumulative_evaluations = Vec::with_capacity(cap);
    let mut wall_time = Vec::with_capacity(cap);

    let mut record = |state: &SolverState| {
        if let (Some(d), Some(zs)) = (distances.as_mut(), z_star) {
            d.push((&state.z - zs).norm_squared());
        }
        if let Some(it) = iterates.as_mut() {
            it.push(state.z.clone());
        }
        iterate_norms.push(state.z.norm());
        step_lengths.push((&state.z - &state.z_prev).norm());
        cumulative_samples.push(state.samples);
        cumulative_evaluations.push(state.evaluations);
        wall_time.push(start.elapsed().as_secs_f64());
    };
    record(&state);

    for k in 0..k_max {
        match params {
            SchemeParams::ExtraPoint(p) => {
                extra_point_step(&mut state, p, set, oracle, &mut rng)?;
            }
            SchemeParams::DiminishingExtraPoint => {
                let p = diminishing_extra_point_params(k, problem.modulus, problem.lipschitz);
                extra_point_step(&mut state, &p, set, oracle, &mut rng)?;
            }
            SchemeParams::ExtraMomentum(p) => {
                let before = potentials
                    .is_some()
                    .then(|| (state.z.clone(), state.z_prev.clone(), state.f_prev.clone()));
                let out = extra_momentum_step(&mut state, p, set, oracle, &mut rng)?;
                if let (Some(v), Some((z, zp, fp)), Some(zs)) = (potentials.as_mut(), before, z_star) {
                    v.push(potential(&z, &zp, &fp, &out.fresh, zs, p, problem.lipschitz));
                }
            }
        }
        record(&state);
    }

    Ok(ReplicationTrace {
        distances,
        potentials,
        iterates,
        iterate_norms,
        step_lengths,
        cumulative_samples,
        cumulative_evaluations,
        warmup_samples: state.warmup_samples,
        wall_time,
        final_iterate: state.z,
    })
}
