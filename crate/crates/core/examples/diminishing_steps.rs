//! Diminishing step sizes `2/((k+2)μ)` under oracle noise: `(k+2) E[d_k]`
//! levels off instead of growing.

use std::sync::Arc;

use stochvi::problems::QuadraticVi;
use stochvi::rng;
use stochvi::schemes::{run_first_order, RunConfig, SchemeParams};
use stochvi::vi::Ball;
use stochvi::Point;

fn main() -> stochvi::Result<()> {
    let mut r = rng::stream(6, rng::PROBLEM_STREAM);
    let vi = QuadraticVi::random_skew(6, 2.0, Point::from_element(6, 0.2), &mut r)?
        .problem(Arc::new(Ball::unit(6)), 0.5)?;
    let trace = run_first_order(
        &vi,
        &SchemeParams::DiminishingExtraPoint,
        &RunConfig::new(Point::zeros(6), 2000, 40, 6),
    )?;
    let d = trace.mean_distances.expect("reference solution is known");
    for k in [10, 50, 100, 500, 1000, 2000] {
        println!("k = {k:>5}: E[d_k] = {:.4e}, (k+2)E[d_k] = {:.4}", d[k], (k as f64 + 2.0) * d[k]);
    }
    Ok(())
}
