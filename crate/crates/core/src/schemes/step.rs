//! Single iterations of the extra-point and extra-momentum updates.
//!
//! The update rules only see a [`DirectionOracle`], which is told which
//! evaluation slot it is filling. First-order runs ignore the slot;
//! zeroth-order runs use it to pick the batch size.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::all_finite;
use crate::rng::StreamRng;
use crate::schemes::params::{ExtraMomentumParams, ExtraPointParams};
use crate::vi::{FeasibleSet, StochasticOracle};
use crate::Point;

/// Which evaluation of the run an oracle call serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// The cached evaluation at `z^{-1} = z^0` made before the first step.
    Warmup,
    /// `F̂(z^k)`.
    Iterate(usize),
    /// `F̂(z^{k+0.5})`.
    Extra(usize),
}

#[derive(Debug, Clone)]
pub struct Estimate {
    pub value: Point,
    /// Oracle draws consumed.
    pub samples: u64,
    /// Raw function or mapping evaluations consumed.
    pub evaluations: u64,
}

pub trait DirectionOracle: Send + Sync {
    fn dim(&self) -> usize;

    fn estimate(&self, z: &Point, slot: Slot, rng: &mut StreamRng) -> Result<Estimate>;
}

/// Uses one draw of a [`StochasticOracle`] per evaluation.
#[derive(Clone)]
pub struct FirstOrder(pub Arc<dyn StochasticOracle>);

impl DirectionOracle for FirstOrder {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn estimate(&self, z: &Point, _slot: Slot, rng: &mut StreamRng) -> Result<Estimate> {
        Ok(Estimate {
            value: self.0.sample(z, rng)?,
            samples: 1,
            evaluations: 1,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub k: usize,
    pub z_prev: Point,
    pub z: Point,
    /// `F̂(z^{k-1})`, sampled at `z_prev` during the previous step.
    pub f_prev: Point,
    pub samples: u64,
    pub evaluations: u64,
    /// Draws spent on the warm-up evaluation, not included in `samples`.
    pub warmup_samples: u64,
}

impl SolverState {
    /// Projects `z0`, sets `z^{-1} = z^0` and caches a fresh sample there.
    pub fn initialize(
        z0: &Point,
        set: &dyn FeasibleSet,
        oracle: &dyn DirectionOracle,
        rng: &mut StreamRng,
    ) -> Result<Self> {
        if z0.len() != set.dim() || oracle.dim() != set.dim() {
            return Err(Error::DimensionMismatch {
                expected: set.dim(),
                found: if z0.len() != set.dim() { z0.len() } else { oracle.dim() },
            });
        }
        if !all_finite(z0) {
            return Err(Error::NonFinite {
                context: "initial point",
                iteration: 0,
            });
        }
        let z = set.project(z0);
        let warm = oracle.estimate(&z, Slot::Warmup, rng)?;
        check_finite(&warm.value, "warm-up evaluation", 0)?;
        Ok(SolverState {
            k: 0,
            z_prev: z.clone(),
            z,
            f_prev: warm.value,
            samples: 0,
            evaluations: 0,
            warmup_samples: warm.samples,
        })
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    /// `F̂(z^k)` as sampled during this step.
    pub fresh: Point,
    /// `z^{k+0.5}` for extra-point steps.
    pub extra_point: Option<Point>,
    pub samples: u64,
}

fn check_finite(v: &Point, context: &'static str, iteration: usize) -> Result<()> {
    if all_finite(v) {
        Ok(())
    } else {
        Err(Error::NonFinite { context, iteration })
    }
}

fn advance(state: &mut SolverState, next: Point, fresh: &Point, samples: u64, evaluations: u64) {
    state.z_prev = std::mem::replace(&mut state.z, next);
    state.f_prev = fresh.clone();
    state.samples += samples;
    state.evaluations += evaluations;
    state.k += 1;
}

/// ```text
/// z^{k+.5} = P(z^k + β(z^k - z^{k-1}) - η F̂(z^k))
/// z^{k+1}  = P(z^k - α F̂(z^{k+.5}) + γ(z^k - z^{k-1}) - τ(F̂(z^k) - F̂(z^{k-1})))
/// ```
pub fn extra_point_step(
    state: &mut SolverState,
    p: &ExtraPointParams,
    set: &dyn FeasibleSet,
    oracle: &dyn DirectionOracle,
    rng: &mut StreamRng,
) -> Result<StepOutcome> {
    let k = state.k;
    let at_k = oracle.estimate(&state.z, Slot::Iterate(k), rng)?;
    check_finite(&at_k.value, "oracle evaluation", k)?;
    let momentum = &state.z - &state.z_prev;

    let half = set.project(&(&state.z + &momentum * p.beta - &at_k.value * p.eta));
    check_finite(&half, "extra point", k)?;
    let at_half = oracle.estimate(&half, Slot::Extra(k), rng)?;
    check_finite(&at_half.value, "oracle evaluation", k)?;

    let next = set.project(
        &(&state.z - &at_half.value * p.alpha + &momentum * p.gamma
            - (&at_k.value - &state.f_prev) * p.tau),
    );
    check_finite(&next, "extra-point iterate", k)?;

    let samples = at_k.samples + at_half.samples;
    advance(state, next, &at_k.value, samples, at_k.evaluations + at_half.evaluations);
    Ok(StepOutcome {
        fresh: at_k.value,
        extra_point: Some(half),
        samples,
    })
}

/// `z^{k+1} = P(z^k - α F̂(z^k) + γ(z^k - z^{k-1}) - τ(F̂(z^k) - F̂(z^{k-1})))`
pub fn extra_momentum_step(
    state: &mut SolverState,
    p: &ExtraMomentumParams,
    set: &dyn FeasibleSet,
    oracle: &dyn DirectionOracle,
    rng: &mut StreamRng,
) -> Result<StepOutcome> {
    let k = state.k;
    let at_k = oracle.estimate(&state.z, Slot::Iterate(k), rng)?;
    check_finite(&at_k.value, "oracle evaluation", k)?;
    let momentum = &state.z - &state.z_prev;
    let next = set.project(
        &(&state.z - &at_k.value * p.alpha + momentum * p.gamma
            - (&at_k.value - &state.f_prev) * p.tau),
    );
    check_finite(&next, "extra-momentum iterate", k)?;

    let samples = at_k.samples;
    advance(state, next, &at_k.value, samples, at_k.evaluations);
    Ok(StepOutcome {
        fresh: at_k.value,
        extra_point: None,
        samples,
    })
}

/// Extra-point with `(α, 0, 0, α, 0)`.
pub fn extra_gradient_step(
    state: &mut SolverState,
    step_size: f64,
    set: &dyn FeasibleSet,
    oracle: &dyn DirectionOracle,
    rng: &mut StreamRng,
) -> Result<StepOutcome> {
    extra_point_step(state, &ExtraPointParams::extra_gradient(step_size), set, oracle, rng)
}

/// Extra-momentum with `(α, 0, α)`.
pub fn ogda_step(
    state: &mut SolverState,
    step_size: f64,
    set: &dyn FeasibleSet,
    oracle: &dyn DirectionOracle,
    rng: &mut StreamRng,
) -> Result<StepOutcome> {
    extra_momentum_step(state, &ExtraMomentumParams::ogda(step_size), set, oracle, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::vi::{AffineMapping, EuclideanSpace, ExactOracle, GaussianNoiseOracle};
    use nalgebra::{DMatrix, DVector};

    fn identity_oracle(n: usize) -> FirstOrder {
        let map = AffineMapping::new(DMatrix::identity(n, n), DVector::zeros(n)).unwrap();
        FirstOrder(Arc::new(ExactOracle::new(Arc::new(map))))
    }

    #[test]
    fn unit_extra_gradient_on_identity() {
        // The extra point lands on the solution; the correction step uses
        // F(0) = 0 and so stays at z^0.
        let set = EuclideanSpace::new(3);
        let oracle = identity_oracle(3);
        let mut r = rng::stream(0, 0);
        let z0 = DVector::from_vec(vec![1.0, -2.0, 3.0]);
        let mut s = SolverState::initialize(&z0, &set, &oracle, &mut r).unwrap();
        assert_eq!(s.z_prev, s.z);
        let out = extra_point_step(&mut s, &ExtraPointParams::extra_gradient(1.0), &set, &oracle, &mut r).unwrap();
        assert_eq!(out.extra_point.unwrap(), DVector::zeros(3));
        assert_eq!(s.z, z0);
        assert_eq!(out.samples, 2);
        assert_eq!(s.samples, 2);
        assert_eq!(s.warmup_samples, 1);
    }

    #[test]
    fn degenerate_momentum_is_projected_gradient() {
        let set = EuclideanSpace::new(2);
        let oracle = identity_oracle(2);
        let mut r = rng::stream(0, 0);
        let mut s = SolverState::initialize(&DVector::from_vec(vec![4.0, 5.0]), &set, &oracle, &mut r).unwrap();
        let out = extra_momentum_step(&mut s, &ExtraMomentumParams::new(1.0, 0.0, 0.0, 0.125), &set, &oracle, &mut r).unwrap();
        assert_eq!(out.samples, 1);
        assert_eq!(s.z, DVector::zeros(2));
    }

    #[test]
    fn cached_evaluation_is_the_previous_fresh_sample() {
        let map = Arc::new(AffineMapping::new(DMatrix::identity(2, 2) * 2.0, DVector::zeros(2)).unwrap());
        let oracle = FirstOrder(Arc::new(GaussianNoiseOracle::new(map, 1.0)));
        let set = EuclideanSpace::new(2);
        let mut r = rng::stream(3, 0);
        let mut s = SolverState::initialize(&DVector::from_vec(vec![1.0, 1.0]), &set, &oracle, &mut r).unwrap();
        let p = ExtraMomentumParams::new(0.1, 0.01, 0.09, 0.125);
        for _ in 0..5 {
            let out = extra_momentum_step(&mut s, &p, &set, &oracle, &mut r).unwrap();
            assert_eq!(out.fresh, s.f_prev);
        }
        assert_eq!(s.k, 5);
    }

    #[test]
    fn baselines_match_restricted_parameters_bitwise() {
        let map = Arc::new(AffineMapping::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -2.0, 1.0]), DVector::zeros(2)).unwrap());
        let oracle = FirstOrder(Arc::new(GaussianNoiseOracle::new(map, 0.5)));
        let set = EuclideanSpace::new(2);
        let z0 = DVector::from_vec(vec![0.3, -0.7]);
        let run = |baseline: bool| {
            let mut r = rng::stream(11, 4);
            let mut s = SolverState::initialize(&z0, &set, &oracle, &mut r).unwrap();
            for _ in 0..20 {
                if baseline {
                    extra_gradient_step(&mut s, 0.1, &set, &oracle, &mut r).unwrap();
                } else {
                    extra_point_step(&mut s, &ExtraPointParams::new(0.1, 0.0, 0.0, 0.1, 0.0), &set, &oracle, &mut r).unwrap();
                }
            }
            s.z
        };
        let (a, b) = (run(true), run(false));
        assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn non_finite_iterate_aborts() {
        let set = EuclideanSpace::new(1);
        let oracle = identity_oracle(1);
        let mut r = rng::stream(0, 0);
        let mut s = SolverState::initialize(&DVector::from_vec(vec![1.0]), &set, &oracle, &mut r).unwrap();
        let err = extra_momentum_step(&mut s, &ExtraMomentumParams::new(f64::INFINITY, 0.0, 0.0, 0.1), &set, &oracle, &mut r).unwrap_err();
        assert!(matches!(err, Error::NonFinite { iteration: 0, .. }));
        assert!(SolverState::initialize(&DVector::from_vec(vec![f64::NAN]), &set, &oracle, &mut r).is_err());
    }
}
