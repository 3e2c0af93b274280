//! Command-line front end. Each subcommand loads a configuration, applies
//! flag overrides (flags beat the file, the file beats defaults) and calls
//! into the library.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::harness::{
    build_problem, game_experiment, resolve_params, run_experiment, schedule_for,
    write_game_outputs, write_run_outputs, ExperimentConfig, Method, ParamSource, ProblemKind,
    ResolvedParams,
};
use crate::problems::{write_game, MatrixGame, PayoffNoise};
use crate::rng::{self, PROBE_STREAM, PROBLEM_STREAM};
use crate::schemes::{check_extra_momentum_conditions, check_extra_point_conditions};
use crate::vi::{verify_oracle_contract, StochasticOracle};
use crate::zeroth_order::SingleDrawOracle;

#[derive(Parser, Debug)]
#[command(name = "stochvi", version, about = "Stochastic extra-point and extra-momentum solvers for strongly monotone VIs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed; required here or in the configuration.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_name = "R")]
    replications: Option<usize>,
    /// Horizon K.
    #[arg(long, value_name = "K")]
    iters: Option<usize>,
    /// extra_point, extra_momentum, szo_extra_point, szo_extra_momentum, extra_gradient or ogda.
    #[arg(long, value_name = "NAME")]
    method: Option<String>,
    /// Output directory (or file, for gen-problem).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for replications; results do not depend on it.
    #[arg(long, value_name = "T")]
    threads: Option<usize>,
    /// Run parameters that fail their conditions.
    #[arg(long)]
    override_validation: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Noise {
    Normal,
    Lognormal,
}

impl Noise {
    fn kind(self) -> ProblemKind {
        match self {
            Noise::Normal => ProblemKind::GameNormal,
            Noise::Lognormal => ProblemKind::GameLognormal,
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
struct ParamFlags {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
}

impl ParamFlags {
    fn any_explicit(&self) -> bool {
        [self.alpha, self.beta, self.gamma, self.eta, self.tau]
            .iter()
            .any(Option::is_some)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one method on the configured problem; writes CSV, summary and SVG.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Compare the four methods on a stochastic matrix game.
    GameExperiment {
        #[command(flatten)]
        common: Common,
        /// Payoff noise model (overrides the configured kind).
        #[arg(long, value_enum)]
        noise: Option<Noise>,
    },
    /// Check step-size conditions and print the derived constants.
    CheckParams {
        #[command(flatten)]
        common: Common,
        /// Condition number; uses mu (default 1) and L = kappa*mu instead of a problem.
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[command(flatten)]
        params: ParamFlags,
    },
    /// Monte-Carlo estimates of oracle bias and variance at random probe points.
    EstimateOracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        probes: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Generate a matrix game and write it as JSON (stdout without --out).
    GenProblem {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        sigma2: Option<f64>,
        #[arg(long, value_enum)]
        noise: Option<Noise>,
    },
}

fn load(common: &Common, fallback: impl FnOnce() -> ExperimentConfig) -> Result<ExperimentConfig> {
    let mut c = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => fallback(),
    };
    if let Some(s) = common.seed {
        c.seed = Some(s);
    }
    if let Some(r) = common.replications {
        c.replications = r;
    }
    if let Some(k) = common.iters {
        c.iters = Some(k);
    }
    if let Some(m) = &common.method {
        c.method = m.parse()?;
    }
    if let Some(o) = &common.out {
        c.out = Some(o.clone());
    }
    if let Some(t) = common.threads {
        c.threads = Some(t);
    }
    if common.override_validation {
        c.override_validation = true;
    }
    Ok(c)
}

fn game_defaults() -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.problem.kind = ProblemKind::GameNormal;
    c.problem.sigma2 = 0.5;
    c.replications = 10;
    c
}

fn out_dir(c: &ExperimentConfig) -> PathBuf {
    c.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn solve(common: &Common) -> Result<()> {
    let c = load(common, ExperimentConfig::default)?;
    let run = run_experiment(&c)?;
    let s = &run.summary;
    println!(
        "{}: kappa = {}, d0 = {}, final E[d_K] = {}, samples = {}",
        s.method, s.kappa, s.d0, s.final_mean_dist_sq, s.total_samples
    );
    print_written(&write_run_outputs(&run, &out_dir(&c))?);
    Ok(())
}

fn game(common: &Common, noise: Option<Noise>) -> Result<()> {
    let mut c = load(common, game_defaults)?;
    if let Some(n) = noise {
        c.problem.kind = n.kind();
    }
    let exp = game_experiment(&c)?;
    println!("kappa = {}, horizon = {}", exp.kappa, exp.horizon);
    for run in &exp.runs {
        let s = &run.summary;
        println!(
            "{}: d0 = {}, final E[d_K] = {}, samples = {}",
            s.method, s.d0, s.final_mean_dist_sq, s.total_samples
        );
    }
    print_written(&write_game_outputs(&exp, &out_dir(&c))?);
    Ok(())
}

fn reciprocal(v: f64) -> String {
    if v > 0.0 {
        format!("{v:e} (1/{})", 1.0 / v)
    } else {
        format!("{v:e}")
    }
}

fn check_params(common: &Common, kappa: Option<f64>, mu: Option<f64>, flags: &ParamFlags) -> Result<()> {
    let mut c = load(common, ExperimentConfig::default)?;
    let (mu, lipschitz) = match kappa {
        Some(k) => {
            let mu = mu.unwrap_or(1.0);
            (mu, k * mu)
        }
        None => {
            let built = build_problem(&c)?;
            (built.problem.modulus, built.problem.lipschitz)
        }
    };
    if flags.any_explicit() {
        let p = &mut c.params;
        p.source = ParamSource::Explicit;
        p.alpha = flags.alpha.or(p.alpha);
        p.beta = flags.beta.or(p.beta);
        p.gamma = flags.gamma.or(p.gamma);
        p.eta = flags.eta.or(p.eta);
        p.tau = flags.tau.or(p.tau);
    }
    if flags.theta.is_some() {
        c.params.theta = flags.theta;
    }
    let family = match c.method {
        Method::SzoExtraPoint => Method::ExtraPoint,
        Method::SzoExtraMomentum => Method::ExtraMomentum,
        m => m,
    };
    println!("method = {}, mu = {mu}, L = {lipschitz}, kappa = {}", c.method, lipschitz / mu);
    let violated: Vec<&str> = match resolve_params(&c, family, mu, lipschitz)? {
        ResolvedParams::ExtraPoint(p) => {
            let v = check_extra_point_conditions(&p, mu, lipschitz);
            println!(
                "alpha = {}, beta = {}, gamma = {}, eta = {}, tau = {}",
                p.alpha, p.beta, p.gamma, p.eta, p.tau
            );
            println!("t1 = {}", reciprocal(v.t.t1));
            println!("t2 = {}", reciprocal(v.t.t2));
            println!("t3 = {}", reciprocal(v.t.t3));
            println!("q = {}", v.t.q);
            v.violated
        }
        ResolvedParams::ExtraMomentum(p) => {
            let v = check_extra_momentum_conditions(&p, mu, lipschitz);
            println!(
                "alpha = {}, gamma = {}, tau = {}, theta = {}",
                p.alpha, p.gamma, p.tau, p.theta
            );
            println!("1 + theta/kappa = {}", v.target);
            println!("1 + alpha*mu - gamma = {}", v.monotonicity_margin);
            println!("alpha/tau = {}", v.ratio);
            println!("1/(8 tau^2 L^2 + 2 gamma) = {}", v.displacement_margin);
            v.violated
        }
        ResolvedParams::Diminishing => {
            println!("diminishing steps are not subject to the constant-step conditions");
            Vec::new()
        }
    };
    if violated.is_empty() {
        println!("valid");
        return Ok(());
    }
    println!("invalid: {}", violated.join("; "));
    if c.override_validation {
        Ok(())
    } else {
        Err(Error::Validation {
            violated: violated.into_iter().map(String::from).collect(),
        })
    }
}

fn estimate_oracle(common: &Common, probes: usize, samples: usize) -> Result<()> {
    let c = load(common, ExperimentConfig::default)?;
    c.check()?;
    let built = build_problem(&c)?;
    let seed = c.seed()?;
    let mut probe_rng = rng::stream(seed, PROBE_STREAM);
    let points: Vec<_> = (0..probes).map(|_| built.problem.set.sample_point(&mut probe_rng)).collect();

    let report = |name: &str, oracle: &dyn StochasticOracle, stream: u64| -> Result<serde_json::Value> {
        let mut r = rng::stream(seed, stream);
        let rep = verify_oracle_contract(oracle, &points, samples, &mut r)?;
        Ok(json!({
            "oracle": name,
            "declared_bias": oracle.declared_bias(),
            "declared_variance": oracle.declared_variance(),
            "max_bias_hat": rep.max_bias_hat,
            "max_var_hat": rep.max_var_hat,
            "probes": rep.probes.iter().map(|p| json!({
                "bias_hat": p.bias_hat, "bias_se": p.bias_se,
                "var_hat": p.var_hat, "var_se": p.var_se,
            })).collect::<Vec<_>>(),
            "pass": rep.pass,
        }))
    };

    let first = report("first_order", built.problem.oracle.as_ref(), 0)?;
    let horizon = c.iters.unwrap_or(100);
    let method = if c.method.is_extra_point_family() {
        Method::SzoExtraPoint
    } else {
        Method::SzoExtraMomentum
    };
    let schedule = schedule_for(&c, &built, method, horizon)?;
    let single = SingleDrawOracle {
        function: Arc::clone(&built.function),
        smoothing: schedule.smoothing,
    };
    let mut zo = report("zeroth_order", &single, 1)?;
    zo["rho_x"] = json!(schedule.smoothing.rho_x);
    zo["rho_y"] = json!(schedule.smoothing.rho_y);
    zo["sigma_tilde2"] = json!(single.declared_variance() / 2.0);
    let out = json!({ "seed": seed, "samples_per_point": samples, "reports": [first, zo] });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn gen_problem(
    common: &Common,
    n: Option<usize>,
    m: Option<usize>,
    lambda: Option<f64>,
    sigma2: Option<f64>,
    noise: Option<Noise>,
) -> Result<()> {
    let mut c = load(common, game_defaults)?;
    let p = &mut c.problem;
    p.n = n.unwrap_or(p.n);
    p.m = m.unwrap_or(p.m);
    p.lambda = lambda.unwrap_or(p.lambda);
    p.sigma2 = sigma2.unwrap_or(p.sigma2);
    if let Some(k) = noise {
        p.kind = k.kind();
    }
    let noise = match p.kind {
        ProblemKind::GameNormal => PayoffNoise::Normal,
        ProblemKind::GameLognormal => PayoffNoise::LogNormal,
        ProblemKind::Synthetic => {
            return Err(Error::Config("gen-problem only generates matrix games".into()))
        }
    };
    let (n, m, lambda, sigma2) = (p.n, p.m, p.lambda, p.sigma2);
    let mut r = rng::stream(c.seed()?, PROBLEM_STREAM);
    let game = MatrixGame::generate(n, m, lambda, sigma2, noise, &mut r)?;
    match &c.out {
        Some(path) => {
            crate::problems::save_game(&game, path)?;
            println!("wrote {}", path.display());
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_game(&game, &mut lock)?;
            writeln!(lock)?;
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { common } => solve(&common),
        Command::GameExperiment { common, noise } => game(&common, noise),
        Command::CheckParams {
            common,
            kappa,
            mu,
            params,
        } => check_params(&common, kappa, mu, &params),
        Command::EstimateOracle {
            common,
            probes,
            samples,
        } => estimate_oracle(&common, probes, samples),
        Command::GenProblem {
            common,
            n,
            m,
            lambda,
            sigma2,
            noise,
        } => gen_problem(&common, n, m, lambda, sigma2, noise),
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses `args` and runs the subcommand. Failures print one line
/// `error[<kind>]: <message>` on stderr; exit codes are 2 (config), 3
/// (validation) and 4 (numerical).
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[config]: {}", one_line(first));
            return ExitCode::from(2);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind(), one_line(&e.to_string()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
