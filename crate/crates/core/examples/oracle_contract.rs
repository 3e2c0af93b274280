//! Empirical checks of the modulus, Lipschitz constant and oracle
//! bias/variance contract, including an oracle that under-declares its noise.

use std::sync::Arc;

use stochvi::problems::QuadraticVi;
use stochvi::rng;
use stochvi::vi::{
    verify_lipschitz, verify_monotonicity, verify_oracle_contract, Ball, FeasibleSet,
    GaussianNoiseOracle,
};
use stochvi::Point;

fn main() -> stochvi::Result<()> {
    let mut r = rng::stream(7, rng::PROBLEM_STREAM);
    let q = QuadraticVi::random_symmetric(5, 3.0, Point::zeros(5), &mut r)?;
    let set = Ball::unit(5);
    let mut probe = rng::stream(7, rng::PROBE_STREAM);
    let mono = verify_monotonicity(q.mapping.as_ref(), &set, 500, &mut probe)?;
    let lip = verify_lipschitz(q.mapping.as_ref(), &set, 500, &mut probe)?;
    println!("min ratio {:.4} (mu = 1), pass = {}", mono.min_observed_ratio, mono.pass);
    println!("max ratio {:.4} (L = 3), pass = {}", lip.max_observed_ratio, lip.pass);

    let points: Vec<Point> = (0..4).map(|_| set.sample_point(&mut probe)).collect();
    let honest = GaussianNoiseOracle::new(Arc::clone(&q.mapping) as _, 0.5);
    let liar = honest.clone().with_declared(0.1, 0.01);
    for (name, oracle) in [("honest", honest), ("under-declared", liar)] {
        let rep = verify_oracle_contract(&oracle, &points, 2000, &mut probe)?;
        println!(
            "{name}: E||F^-F||^2 ~ {:.4}, pass = {}",
            rep.max_var_hat, rep.pass
        );
    }
    Ok(())
}
