//! Zeroth-order extra-point and extra-momentum on a quadratic saddle, with the
//! geometric batch schedule.

use stochvi::harness::{run_experiment, ExperimentConfig, Method, ProblemKind};

fn main() -> stochvi::Result<()> {
    for method in [Method::SzoExtraPoint, Method::SzoExtraMomentum] {
        let mut c = ExperimentConfig {
            seed: Some(4),
            replications: 5,
            iters: Some(60),
            method,
            ..ExperimentConfig::default()
        };
        c.problem.kind = ProblemKind::Synthetic;
        c.problem.kappa = 4.0;
        c.problem.sigma2 = 0.1;
        let run = run_experiment(&c)?;
        let s = &run.summary;
        println!(
            "{method}: d0 = {:.3e}, E[d_60] = {:.3e}, draws = {} (closed form {:.0})",
            s.d0,
            s.final_mean_dist_sq,
            s.total_samples,
            s.closed_form_samples.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
