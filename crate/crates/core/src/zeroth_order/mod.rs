//! Zeroth-order variants: randomized-smoothing gradient estimates of a
//! noisy saddle function, mini-batching and the batch schedules.

pub mod estimator;
pub mod schedule;

use std::sync::Arc;

use crate::error::Result;
use crate::rng::StreamRng;
use crate::schemes::{
    extra_momentum_step, extra_point_step, DirectionOracle, Estimate, ExtraMomentumParams,
    ExtraPointParams, Slot, SolverState, StepOutcome,
};
use crate::vi::{FeasibleSet, Mapping, StochasticOracle};
use crate::Point;

pub use estimator::{
    batched_zeroth_order_gradient, sample_unit_sphere, sigma_tilde, sigma_tilde_for,
    zeroth_order_gradient, NoisyFunctionOracle, SmoothingParams,
};
pub use schedule::{
    closed_form_total_samples, make_schedule, total_samples, BatchSchedule, ScheduleVariant,
};

/// Batched zeroth-order estimates with batch size chosen by a schedule.
#[derive(Clone)]
pub struct ZeroOrderOracle {
    pub function: Arc<dyn NoisyFunctionOracle>,
    pub schedule: BatchSchedule,
}

impl ZeroOrderOracle {
    pub fn new(function: Arc<dyn NoisyFunctionOracle>, schedule: BatchSchedule) -> Self {
        ZeroOrderOracle { function, schedule }
    }

    pub fn sigma_tilde(&self) -> f64 {
        sigma_tilde_for(self.function.as_ref(), &self.schedule.smoothing)
    }
}

impl DirectionOracle for ZeroOrderOracle {
    fn dim(&self) -> usize {
        let (n, m) = self.function.dims();
        n + m
    }

    fn estimate(&self, z: &Point, slot: Slot, rng: &mut StreamRng) -> Result<Estimate> {
        batched_zeroth_order_gradient(
            self.function.as_ref(),
            z,
            &self.schedule.smoothing,
            self.schedule.batch_size(slot),
            rng,
        )
    }
}

/// Single zeroth-order draws viewed as a stochastic mapping oracle, for
/// contract checks. Declares variance `2σ̃²` (both blocks) and the Jensen
/// bias bound `sqrt(2σ̃²)`; the smoothing bias is not included, so the check
/// is only exact for quadratic functions.
#[derive(Clone)]
pub struct SingleDrawOracle {
    pub function: Arc<dyn NoisyFunctionOracle>,
    pub smoothing: SmoothingParams,
}

impl StochasticOracle for SingleDrawOracle {
    fn dim(&self) -> usize {
        let (n, m) = self.function.dims();
        n + m
    }

    fn sample(&self, z: &Point, rng: &mut StreamRng) -> Result<Point> {
        zeroth_order_gradient(self.function.as_ref(), z, &self.smoothing, rng)
    }

    fn declared_bias(&self) -> f64 {
        self.declared_variance().sqrt()
    }

    fn declared_variance(&self) -> f64 {
        2.0 * sigma_tilde_for(self.function.as_ref(), &self.smoothing)
    }

    fn systematic_bias(&self) -> f64 {
        0.0
    }

    fn mean_mapping(&self) -> Option<&dyn Mapping> {
        self.function.saddle_operator()
    }
}

/// Extra-point step with both evaluations replaced by scheduled batches.
pub fn szo_extra_point_step(
    state: &mut SolverState,
    params: &ExtraPointParams,
    set: &dyn FeasibleSet,
    oracle: &ZeroOrderOracle,
    rng: &mut StreamRng,
) -> Result<StepOutcome> {
    extra_point_step(state, params, set, oracle, rng)
}

/// Extra-momentum step with the evaluation replaced by a scheduled batch.
pub fn szo_extra_momentum_step(
    state: &mut SolverState,
    params: &ExtraMomentumParams,
    set: &dyn FeasibleSet,
    oracle: &ZeroOrderOracle,
    rng: &mut StreamRng,
) -> Result<StepOutcome> {
    extra_momentum_step(state, params, set, oracle, rng)
}
