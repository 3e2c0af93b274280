//! A regularized stochastic matrix game: condition number, reference
//! equilibrium and a short comparison of the four methods.

use stochvi::harness::{game_experiment, ExperimentConfig, ProblemKind};
use stochvi::problems::{MatrixGame, PayoffNoise, REFERENCE_TOLERANCE};
use stochvi::rng;

fn main() -> stochvi::Result<()> {
    let mut r = rng::stream(5, rng::PROBLEM_STREAM);
    let game = MatrixGame::generate(4, 6, 1.0, 0.5, PayoffNoise::Normal, &mut r)?;
    let c = game.condition_number()?;
    println!("mu = {:.3}, L = {:.3}, kappa = {:.1}", c.mu, c.lipschitz, c.kappa);
    let z_star = game.solve_reference(REFERENCE_TOLERANCE, None)?;
    let x: Vec<String> = z_star.rows(0, 4).iter().map(|v| format!("{v:.4}")).collect();
    println!("equilibrium x* = [{}]", x.join(", "));

    let mut cfg = ExperimentConfig {
        seed: Some(5),
        replications: 3,
        iters: Some(100),
        ..ExperimentConfig::default()
    };
    cfg.problem.kind = ProblemKind::GameLognormal;
    cfg.problem.n = 4;
    cfg.problem.m = 6;
    cfg.problem.sigma2 = 0.5;
    let exp = game_experiment(&cfg)?;
    println!("log-normal game, kappa = {:.1}, K = {}", exp.kappa, exp.horizon);
    for run in &exp.runs {
        println!(
            "{:>20}: E[d_K] / d0 = {:.3e}",
            run.method.name(),
            run.summary.final_mean_dist_sq / run.summary.d0
        );
    }
    Ok(())
}
