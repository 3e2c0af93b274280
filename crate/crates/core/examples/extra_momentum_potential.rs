//! Extra-momentum with the recommended parameters: the potential shrinks by
//! at least `1 + θ/κ` every step.

use std::sync::Arc;

use stochvi::problems::QuadraticVi;
use stochvi::rng;
use stochvi::schemes::{
    default_extra_momentum_params, first_potential_violation, run_first_order, RunConfig,
    SchemeParams, DEFAULT_THETA,
};
use stochvi::vi::EuclideanSpace;
use stochvi::Point;

fn main() -> stochvi::Result<()> {
    let kappa = 20.0;
    let mut r = rng::stream(2, rng::PROBLEM_STREAM);
    let vi = QuadraticVi::random_skew(8, kappa, Point::from_element(8, -0.3), &mut r)?
        .problem(Arc::new(EuclideanSpace::new(8)), 0.0)?;
    let p = default_extra_momentum_params(vi.modulus, vi.lipschitz, DEFAULT_THETA);
    let trace = run_first_order(
        &vi,
        &SchemeParams::ExtraMomentum(p),
        &RunConfig::new(Point::zeros(8), 600, 1, 2),
    )?;
    let v = trace.mean_potentials.expect("potential is tracked");
    let factor = 1.0 + p.theta / kappa;
    for k in (0..600).step_by(60) {
        println!("V_{k:<4} = {:.6e}", v[k]);
    }
    match first_potential_violation(&v, factor, 1e-9) {
        None => println!("(1 + θ/κ) V_(k+1) <= V_k held for all {} steps", v.len() - 1),
        Some(k) => println!("recursion failed at k = {k}"),
    }
    Ok(())
}
