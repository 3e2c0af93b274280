//! The step-size conditions of both schemes, for the recommended parameters
//! and for a perturbed set.

use stochvi::schemes::{
    check_extra_momentum_conditions, check_extra_point_conditions, default_extra_momentum_params,
    default_extra_point_params, ExtraPointParams, DEFAULT_THETA,
};

fn main() {
    for kappa in [1.0, 161.0, 1000.0] {
        let p = default_extra_point_params(1.0, kappa);
        let v = check_extra_point_conditions(&p, 1.0, kappa);
        println!(
            "kappa {kappa:>6}: extra-point valid = {}, 1/t = ({:.0}, {:.1}, {:.0})",
            v.valid,
            1.0 / v.t.t1,
            1.0 / v.t.t2,
            1.0 / v.t.t3
        );
        let q = default_extra_momentum_params(1.0, kappa, DEFAULT_THETA);
        println!(
            "               extra-momentum valid = {}",
            check_extra_momentum_conditions(&q, 1.0, kappa).valid
        );
    }
    let p = default_extra_point_params(1.0, 161.0);
    let bad = ExtraPointParams { tau: 10.0 * p.tau, ..p };
    println!("tau x 10 violates: {:?}", check_extra_point_conditions(&bad, 1.0, 161.0).violated);
}
