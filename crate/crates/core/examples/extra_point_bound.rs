//! Deterministic extra-point run on a skew quadratic VI, printed next to the
//! linear-rate bound of the recommended parameters.

use std::sync::Arc;

use stochvi::problems::QuadraticVi;
use stochvi::rng;
use stochvi::schemes::{
    default_extra_point_params, run_first_order, theoretical_bound_extra_point, RunConfig,
    SchemeParams,
};
use stochvi::vi::EuclideanSpace;
use stochvi::Point;

fn main() -> stochvi::Result<()> {
    let kappa = 10.0;
    let mut r = rng::stream(1, rng::PROBLEM_STREAM);
    let z_star = Point::from_element(6, 0.4);
    let vi = QuadraticVi::random_skew(6, kappa, z_star, &mut r)?
        .problem(Arc::new(EuclideanSpace::new(6)), 0.0)?;

    let params = default_extra_point_params(vi.modulus, vi.lipschitz);
    let trace = run_first_order(
        &vi,
        &SchemeParams::ExtraPoint(params),
        &RunConfig::new(Point::zeros(6), 1000, 1, 1),
    )?;
    let d = trace.mean_distances.expect("reference solution is known");
    println!("{:>5} {:>14} {:>14}", "k", "d_k", "bound");
    for k in (0..=1000).step_by(100) {
        let b = theoretical_bound_extra_point(k, d[0], kappa, 0.0, 0.0, vi.diameter(), vi.lipschitz);
        println!("{k:>5} {:>14.6e} {b:>14.6e}", d[k]);
    }
    Ok(())
}
