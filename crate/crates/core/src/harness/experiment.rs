//! Building problems from a configuration and running methods on them.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::config::{
    BaselineOracle, BatchRule, ExperimentConfig, Method, ParamSource, ProblemKind,
};
use crate::harness::trace::TraceRow;
use crate::problems::{
    load_game, GameValueOracle, MatrixGame, PayoffNoise, QuadraticSaddle, REFERENCE_TOLERANCE,
};
use crate::rng::{self, PROBLEM_STREAM};
use crate::schemes::{
    check_extra_momentum_conditions, check_extra_point_conditions, default_extra_momentum_params,
    default_extra_point_params, extra_momentum_bound_for, general_extra_point_bound,
    recommended_extra_momentum_bound, run_solver, sublinear_bound, theoretical_bound_extra_point,
    DirectionOracle, ExtraMomentumParams, ExtraPointParams, FirstOrder, RunConfig, SchemeParams,
    SolverTrace, DEFAULT_THETA,
};
use crate::vi::{Ball, GaussianNoiseOracle, ViProblem};
use crate::zeroth_order::{
    closed_form_total_samples, make_schedule, BatchSchedule, NoisyFunctionOracle, ScheduleVariant,
    SmoothingParams, ZeroOrderOracle,
};
use crate::Point;

/// A problem with both a first-order oracle and a noisy value oracle.
#[derive(Clone)]
pub struct BuiltProblem {
    pub problem: ViProblem,
    pub function: Arc<dyn NoisyFunctionOracle>,
    pub z0: Point,
    /// Set for game problems.
    pub game: Option<MatrixGame>,
}

impl BuiltProblem {
    pub fn d0(&self) -> f64 {
        let z_star = self.problem.reference_solution.as_ref().expect("reference solution");
        (self.problem.set.project(&self.z0) - z_star).norm_squared()
    }
}

/// Generates (on the problem stream of `seed`) or loads the configured problem
/// and solves for its reference point.
pub fn build_problem(config: &ExperimentConfig) -> Result<BuiltProblem> {
    let p = &config.problem;
    let seed = config.seed()?;
    let mut rng = rng::stream(seed, PROBLEM_STREAM);
    match p.kind {
        ProblemKind::Synthetic => {
            // value noise per block carries half the first-order variance
            let saddle = QuadraticSaddle::random(p.n, p.m, p.kappa, p.sigma2 / 2.0, p.radius, &mut rng)?;
            let operator = Arc::new(saddle.operator().clone());
            let set = Arc::new(Ball::new(Point::zeros(saddle.dim()), p.radius));
            let oracle = Arc::new(GaussianNoiseOracle::new(operator.clone(), p.sigma2));
            let problem = ViProblem::from_mapping_constants(set, oracle)?
                .with_reference_solution(saddle.z_star())?;
            Ok(BuiltProblem {
                problem,
                z0: Point::zeros(saddle.dim()),
                function: Arc::new(saddle),
                game: None,
            })
        }
        ProblemKind::GameNormal | ProblemKind::GameLognormal => {
            let noise = if p.kind == ProblemKind::GameNormal {
                PayoffNoise::Normal
            } else {
                PayoffNoise::LogNormal
            };
            let game = match &p.path {
                Some(path) => {
                    let g = load_game(path)?;
                    if g.noise != noise {
                        return Err(Error::Config(format!(
                            "{} holds a {:?} game but the config asks for {:?}",
                            path.display(),
                            g.noise,
                            noise
                        )));
                    }
                    g
                }
                None => MatrixGame::generate(p.n, p.m, p.lambda, p.sigma2, noise, &mut rng)?,
            };
            let problem = game.problem(REFERENCE_TOLERANCE)?;
            Ok(BuiltProblem {
                problem,
                z0: game.uniform_strategies(),
                function: Arc::new(GameValueOracle::new(game.clone())?),
                game: Some(game),
            })
        }
    }
}

/// The parameters a method ends up running with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ResolvedParams {
    ExtraPoint(ExtraPointParams),
    ExtraMomentum(ExtraMomentumParams),
    Diminishing,
}

impl ResolvedParams {
    pub fn scheme(&self) -> SchemeParams {
        match *self {
            ResolvedParams::ExtraPoint(p) => SchemeParams::ExtraPoint(p),
            ResolvedParams::ExtraMomentum(p) => SchemeParams::ExtraMomentum(p),
            ResolvedParams::Diminishing => SchemeParams::DiminishingExtraPoint,
        }
    }
}

fn required(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Config(format!("explicit parameters need `{name}`")))
}

/// Picks the parameters for `method` from the `[params]` section.
pub fn resolve_params(config: &ExperimentConfig, method: Method, mu: f64, lipschitz: f64) -> Result<ResolvedParams> {
    let c = &config.params;
    if method.is_baseline() {
        let step = c.step_size.unwrap_or(1.0 / (4.0 * lipschitz));
        return Ok(match method {
            Method::ExtraGradient => ResolvedParams::ExtraPoint(ExtraPointParams::extra_gradient(step)),
            _ => ResolvedParams::ExtraMomentum(ExtraMomentumParams::ogda(step)),
        });
    }
    let theta = c.theta.unwrap_or(DEFAULT_THETA);
    Ok(match (c.source, method.is_extra_point_family()) {
        (ParamSource::Diminishing, true) => ResolvedParams::Diminishing,
        (ParamSource::Diminishing, false) => {
            return Err(Error::Config(
                "the diminishing schedule applies to extra-point methods only".into(),
            ))
        }
        (ParamSource::Default, true) => {
            ResolvedParams::ExtraPoint(default_extra_point_params(mu, lipschitz))
        }
        (ParamSource::Default, false) => {
            ResolvedParams::ExtraMomentum(default_extra_momentum_params(mu, lipschitz, theta))
        }
        (ParamSource::Explicit, true) => {
            let alpha = required(c.alpha, "alpha")?;
            ResolvedParams::ExtraPoint(ExtraPointParams::new(
                alpha,
                required(c.beta, "beta")?,
                required(c.gamma, "gamma")?,
                c.eta.unwrap_or(alpha),
                required(c.tau, "tau")?,
            ))
        }
        (ParamSource::Explicit, false) => ResolvedParams::ExtraMomentum(ExtraMomentumParams::new(
            required(c.alpha, "alpha")?,
            required(c.gamma, "gamma")?,
            required(c.tau, "tau")?,
            theta,
        )),
    })
}

/// Bound on `E[d_k]` matching the parameters, or `None` when no result of
/// the theory covers the run (baselines, zeroth-order oracles, parameters
/// that fail their conditions).
pub fn bound_column(
    built: &BuiltProblem,
    method: Method,
    params: &ResolvedParams,
    source: ParamSource,
    iterations: usize,
) -> Option<Vec<f64>> {
    if method.is_baseline() || !matches!(method, Method::ExtraPoint | Method::ExtraMomentum) {
        return None;
    }
    let vi = &built.problem;
    let (mu, l) = (vi.modulus, vi.lipschitz);
    let kappa = vi.kappa();
    let d0 = built.d0();
    let sigma2 = vi.oracle.declared_variance();
    let delta = vi.oracle.systematic_bias();
    let diameter = vi.diameter();
    let ks = 0..=iterations;
    match (params, source) {
        (ResolvedParams::ExtraPoint(_), ParamSource::Default) => Some(
            ks.map(|k| theoretical_bound_extra_point(k, d0, kappa, sigma2, delta, diameter, l))
                .collect(),
        ),
        (ResolvedParams::ExtraPoint(p), _) => {
            let verdict = check_extra_point_conditions(p, mu, l);
            verdict.valid.then(|| {
                ks.map(|k| general_extra_point_bound(k, d0, p, &verdict.t, l, sigma2, delta, diameter))
                    .collect()
            })
        }
        (ResolvedParams::ExtraMomentum(_), ParamSource::Default)
            if built_default_theta(params) =>
        {
            Some(
                ks.map(|k| recommended_extra_momentum_bound(k, d0, mu, l, sigma2, delta))
                    .collect(),
            )
        }
        (ResolvedParams::ExtraMomentum(p), _) => check_extra_momentum_conditions(p, mu, l)
            .valid
            .then(|| {
                ks.map(|k| extra_momentum_bound_for(k, d0, p, mu, l, sigma2, delta))
                    .collect()
            }),
        (ResolvedParams::Diminishing, _) => Some(
            ks.map(|k| sublinear_bound(k, d0, kappa, sigma2, diameter, delta, mu))
                .collect(),
        ),
    }
}

fn built_default_theta(params: &ResolvedParams) -> bool {
    matches!(params, ResolvedParams::ExtraMomentum(p) if p.theta == DEFAULT_THETA)
}

fn uses_zeroth_order(config: &ExperimentConfig, method: Method) -> bool {
    match method {
        Method::SzoExtraPoint | Method::SzoExtraMomentum => true,
        Method::ExtraGradient | Method::Ogda => {
            config.baseline_oracle == BaselineOracle::ZerothOrder
        }
        Method::ExtraPoint | Method::ExtraMomentum => false,
    }
}

/// The batch schedule a zeroth-order run would use for `method`.
pub fn schedule_for(
    config: &ExperimentConfig,
    built: &BuiltProblem,
    method: Method,
    iterations: usize,
) -> Result<BatchSchedule> {
    let variant = if method.is_extra_point_family() {
        ScheduleVariant::ExtraPoint
    } else {
        ScheduleVariant::ExtraMomentum
    };
    let horizon = iterations.max(1);
    let zo = &config.zeroth_order;
    match zo.batch_rule {
        BatchRule::Scheduled => {
            let (n, m) = built.function.dims();
            make_schedule(variant, horizon, built.problem.kappa(), n, m)
        }
        BatchRule::Constant => {
            let (rx, ry) = match (zo.rho_x, zo.rho_y) {
                (Some(x), Some(y)) => (x, y),
                _ => return Err(Error::Config("constant batch rule needs rho_x and rho_y".into())),
            };
            BatchSchedule::constant(variant, zo.batch.unwrap_or(1), horizon, SmoothingParams::new(rx, ry)?)
        }
    }
}

/// Deterministic description of a finished run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub method: Method,
    pub problem: ProblemKind,
    pub seed: u64,
    pub replications: usize,
    pub iterations: usize,
    pub mu: f64,
    pub lipschitz: f64,
    pub kappa: f64,
    pub d0: f64,
    pub sigma2: f64,
    pub delta: f64,
    pub diameter: f64,
    pub params: ResolvedParams,
    pub zeroth_order: bool,
    pub final_mean_dist_sq: f64,
    pub total_samples: u64,
    pub total_evaluations: u64,
    pub warmup_samples: u64,
    /// Exact draw count of the batch schedule over the horizon.
    pub schedule_total_samples: Option<u64>,
    /// The same count without ceilings, in closed form.
    pub closed_form_samples: Option<f64>,
    pub sigma_tilde2: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub rows: Vec<TraceRow>,
    pub summary: Summary,
    pub trace: SolverTrace,
}

impl MethodRun {
    /// Mean wall-clock seconds since the start of the replication, per `k`.
    pub fn mean_wall_time(&self) -> Vec<f64> {
        let reps = &self.trace.replications;
        let len = reps[0].wall_time.len();
        (0..len)
            .map(|k| reps.iter().map(|r| r.wall_time[k]).sum::<f64>() / reps.len() as f64)
            .collect()
    }
}

/// Runs `method` for `iterations` steps on an already built problem.
pub fn run_method(
    config: &ExperimentConfig,
    built: &BuiltProblem,
    method: Method,
    iterations: usize,
) -> Result<MethodRun> {
    let seed = config.seed()?;
    let vi = &built.problem;
    let params = resolve_params(config, method, vi.modulus, vi.lipschitz)?;
    let zeroth = uses_zeroth_order(config, method);
    let schedule = zeroth
        .then(|| schedule_for(config, built, method, iterations))
        .transpose()?;
    let oracle: Box<dyn DirectionOracle> = match &schedule {
        Some(s) => Box::new(ZeroOrderOracle::new(built.function.clone(), s.clone())),
        None => Box::new(FirstOrder(vi.oracle.clone())),
    };
    let run = RunConfig::new(built.z0.clone(), iterations, config.replications, seed)
        .override_validation(config.override_validation || method.is_baseline());
    let trace = run_solver(vi, oracle.as_ref(), &params.scheme(), &run)?;

    let bound = if zeroth {
        None
    } else {
        bound_column(built, method, &params, config.params.source, iterations)
    };
    let rows = TraceRow::from_trace(&trace, bound.as_deref(), config.per_replication)?;
    let last = rows.last().expect("at least one row");
    let closed_form = schedule
        .as_ref()
        .filter(|_| config.zeroth_order.batch_rule == BatchRule::Scheduled)
        .map(|s| closed_form_total_samples(s.variant, s.horizon, s.kappa));
    let summary = Summary {
        method,
        problem: config.problem.kind,
        seed,
        replications: config.replications,
        iterations,
        mu: vi.modulus,
        lipschitz: vi.lipschitz,
        kappa: vi.kappa(),
        d0: built.d0(),
        sigma2: vi.oracle.declared_variance(),
        delta: vi.oracle.systematic_bias(),
        diameter: vi.diameter(),
        params,
        zeroth_order: zeroth,
        final_mean_dist_sq: last.mean_dist_sq,
        total_samples: last.cum_samples,
        total_evaluations: last.cum_evaluations,
        warmup_samples: trace.warmup_samples(),
        schedule_total_samples: schedule.as_ref().map(|s| s.total_samples()),
        closed_form_samples: closed_form,
        sigma_tilde2: schedule
            .as_ref()
            .map(|s| crate::zeroth_order::sigma_tilde_for(built.function.as_ref(), &s.smoothing)),
    };
    Ok(MethodRun {
        method,
        rows,
        summary,
        trace,
    })
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?
            .install(f),
    }
}

/// Default horizon of the game comparison: `⌈κ ln(10⁴)⌉`.
pub fn game_horizon(kappa: f64) -> usize {
    (kappa * 1e4_f64.ln()).ceil() as usize
}

/// One configured method on the configured problem.
pub fn run_experiment(config: &ExperimentConfig) -> Result<MethodRun> {
    config.check()?;
    with_threads(config.threads, || {
        let built = build_problem(config)?;
        let iterations = config
            .iters
            .ok_or_else(|| Error::Config("`iters` is required for a single run".into()))?;
        run_method(config, &built, config.method, iterations)
    })
}

#[derive(Debug, Clone)]
pub struct GameExperiment {
    pub kappa: f64,
    pub horizon: usize,
    pub runs: Vec<MethodRun>,
}

/// The four implemented methods of the game comparison, all from the noisy
/// payoff values through the zeroth-order estimator.
pub const GAME_METHODS: [Method; 4] = [
    Method::SzoExtraPoint,
    Method::SzoExtraMomentum,
    Method::ExtraGradient,
    Method::Ogda,
];

/// Generates (or loads) one game and runs every method of [`GAME_METHODS`]
/// with zeroth-order oracles over the same horizon.
pub fn game_experiment(config: &ExperimentConfig) -> Result<GameExperiment> {
    config.check()?;
    if config.problem.kind == ProblemKind::Synthetic {
        return Err(Error::Config("game-experiment needs a game problem kind".into()));
    }
    let mut config = config.clone();
    config.baseline_oracle = BaselineOracle::ZerothOrder;
    config.params.source = ParamSource::Default;
    with_threads(config.threads, || {
        let built = build_problem(&config)?;
        let kappa = built.problem.kappa();
        let horizon = config.iters.unwrap_or_else(|| game_horizon(kappa));
        let runs = GAME_METHODS
            .iter()
            .map(|&m| run_method(&config, &built, m, horizon))
            .collect::<Result<Vec<_>>>()?;
        Ok(GameExperiment {
            kappa,
            horizon,
            runs,
        })
    })
}
