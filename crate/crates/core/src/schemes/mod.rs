//! Extra-point and extra-momentum schemes, their baselines, parameter
//! conditions, bounds and the replicated driver.

pub mod bounds;
pub mod driver;
pub mod params;
pub mod step;

pub use bounds::{
    extra_momentum_bound_for, extra_momentum_noise_floor, first_certificate_violation,
    first_potential_violation, general_extra_point_bound, potential,
    recommended_extra_momentum_bound, sublinear_bound, theoretical_bound_extra_momentum,
    theoretical_bound_extra_point,
};
pub use driver::{run_first_order, run_solver, ReplicationTrace, RunConfig, SchemeParams, SolverTrace};
pub use params::{
    check_extra_momentum_conditions, check_extra_point_conditions, default_extra_momentum_params,
    default_extra_point_params, diminishing_extra_point_params, ExtraMomentumParams,
    ExtraMomentumVerdict, ExtraPointParams, ExtraPointVerdict, TParameters, DEFAULT_THETA,
    EM_DISPLACEMENT, EM_MONOTONICITY, EM_NONNEGATIVE, EM_RATIO, EM_THETA_RANGE,
    EP_ETA_EQUALS_ALPHA, EP_NONNEGATIVE, EP_STEP_BUDGET, EP_T1_BELOW_ONE, EP_T2_MARGIN,
    EP_T3_BELOW_T1, EP_T3_NONNEGATIVE,
};
pub use step::{
    extra_gradient_step, extra_momentum_step, extra_point_step, ogda_step, DirectionOracle,
    Estimate, FirstOrder, Slot, SolverState, StepOutcome,
};
