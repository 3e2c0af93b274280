//! Averages of the two-point sphere-smoothing estimator against the exact
//! saddle operator, and the variance bound `σ̃²`.

use nalgebra::DMatrix;
use rand::Rng;

use stochvi::problems::QuadraticSaddle;
use stochvi::rng;
use stochvi::vi::Mapping;
use stochvi::zeroth_order::{batched_zeroth_order_gradient, sigma_tilde_for, SmoothingParams};
use stochvi::Point;

fn main() -> stochvi::Result<()> {
    let (n, m) = (4, 3);
    let mut r = rng::stream(3, rng::PROBLEM_STREAM);
    let a = DMatrix::from_fn(n, m, |_, _| r.random_range(-1.0..1.0));
    let saddle = QuadraticSaddle::new(1.0, 1.0, a, Point::zeros(n), Point::zeros(m), 0.1, 2.0)?;
    let z = Point::from_fn(n + m, |i, _| 0.1 * i as f64);
    let s = SmoothingParams::new(0.01, 0.01)?;
    let truth = saddle.operator().evaluate(&z);
    println!("sigma_tilde^2 = {:.4}", sigma_tilde_for(&saddle, &s));
    for t in [1, 100, 10_000] {
        let est = batched_zeroth_order_gradient(&saddle, &z, &s, t, &mut r)?;
        println!(
            "t = {t:>6}: ||estimate - F(z)|| = {:.4e} ({} evaluations)",
            (est.value - &truth).norm(),
            est.evaluations
        );
    }
    Ok(())
}
