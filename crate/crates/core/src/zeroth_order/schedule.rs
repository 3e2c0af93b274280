//! Geometrically growing batch sizes and the matching smoothing radii.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schemes::Slot;
use crate::zeroth_order::estimator::SmoothingParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleVariant {
    /// One batch at `z^k` and one at `z^{k+0.5}`, both of size `t_k`.
    ExtraPoint,
    /// One batch at `z^k` per iteration.
    ExtraMomentum,
}

impl ScheduleVariant {
    /// `C` such that `t_k` grows like `C^{-k}`.
    pub fn ratio(self, kappa: f64) -> f64 {
        match self {
            ScheduleVariant::ExtraPoint => 1.0 - 1.0 / (256.0 * kappa),
            ScheduleVariant::ExtraMomentum => 1.0 - 1.0 / (8.0 * kappa + 1.0),
        }
    }

    /// Batches drawn per iteration.
    pub fn batches_per_iteration(self) -> u64 {
        match self {
            ScheduleVariant::ExtraPoint => 2,
            ScheduleVariant::ExtraMomentum => 1,
        }
    }

    /// Untruncated `t_k`: `K C^{-(k+1)}` for extra-point, `K C^{-k}` for
    /// extra-momentum.
    fn raw_size(self, horizon: usize, kappa: f64, k: usize) -> f64 {
        let c = self.ratio(kappa);
        let exp = match self {
            ScheduleVariant::ExtraPoint => k as f64 + 1.0,
            ScheduleVariant::ExtraMomentum => k as f64,
        };
        horizon as f64 * c.powf(-exp)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSchedule {
    pub variant: ScheduleVariant,
    pub horizon: usize,
    pub kappa: f64,
    pub smoothing: SmoothingParams,
    sizes: Vec<u64>,
    geometric: bool,
}

/// `t_k` and `ρ` for a run of `horizon` iterations at condition number
/// `kappa`. Radii are `C^K/(√2 nκ)` (extra-point) or `C^{K/2}/(√2 nκ)`
/// (extra-momentum), and analogously with `m`.
pub fn make_schedule(
    variant: ScheduleVariant,
    horizon: usize,
    kappa: f64,
    n: usize,
    m: usize,
) -> Result<BatchSchedule> {
    if horizon == 0 {
        return Err(Error::invalid("schedule horizon must be at least 1"));
    }
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(Error::invalid(format!("condition number must be >= 1, got {kappa}")));
    }
    if n == 0 || m == 0 {
        return Err(Error::invalid("block dimensions must be positive"));
    }
    let c = variant.ratio(kappa);
    let decay = match variant {
        ScheduleVariant::ExtraPoint => c.powf(horizon as f64),
        ScheduleVariant::ExtraMomentum => c.powf(horizon as f64 / 2.0),
    };
    let base = decay / (2f64.sqrt() * kappa);
    let smoothing = SmoothingParams::new(base / n as f64, base / m as f64)?;
    let sizes = (0..horizon)
        .map(|k| variant.raw_size(horizon, kappa, k).ceil() as u64)
        .collect();
    Ok(BatchSchedule {
        variant,
        horizon,
        kappa,
        smoothing,
        sizes,
        geometric: true,
    })
}

impl BatchSchedule {
    /// A fixed batch size with caller-chosen radii.
    pub fn constant(
        variant: ScheduleVariant,
        batch: u64,
        horizon: usize,
        smoothing: SmoothingParams,
    ) -> Result<Self> {
        if batch == 0 {
            return Err(Error::invalid("batch size must be at least 1"));
        }
        Ok(BatchSchedule {
            variant,
            horizon,
            kappa: f64::NAN,
            smoothing,
            sizes: vec![batch; horizon.max(1)],
            geometric: false,
        })
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    /// `t_k`; iterations past the horizon keep growing along the same
    /// geometric law. The warm-up evaluation uses `t_0`.
    pub fn batch_size(&self, slot: Slot) -> u64 {
        let k = match slot {
            Slot::Warmup => 0,
            Slot::Iterate(k) | Slot::Extra(k) => k,
        };
        match self.sizes.get(k) {
            Some(&t) => t,
            None if self.geometric => {
                self.variant.raw_size(self.horizon, self.kappa, k).ceil() as u64
            }
            None => self.sizes[0],
        }
    }

    /// Oracle draws over iterations `0..horizon`.
    pub fn total_samples(&self) -> u64 {
        self.variant.batches_per_iteration() * self.sizes[..self.horizon].iter().sum::<u64>()
    }
}

/// Exact draw count `Σ_k (t_k + t_{k+0.5})` or `Σ_k t_k` of the ceiled schedule.
pub fn total_samples(variant: ScheduleVariant, horizon: usize, kappa: f64) -> Result<u64> {
    Ok(make_schedule(variant, horizon, kappa, 1, 1)?.total_samples())
}

/// The same sum without the ceilings, in closed form. For extra-point this is
/// `2K(C^{-K} - 1)/(1 - C)`; for extra-momentum the geometric sum
/// `K(C^{-K} - 1)/(C^{-1} - 1)`, which is `C` times the simplified
/// `K(C^{-K} - 1)/(1 - C)` sometimes quoted for it.
pub fn closed_form_total_samples(variant: ScheduleVariant, horizon: usize, kappa: f64) -> f64 {
    let c = variant.ratio(kappa);
    let k = horizon as f64;
    let grow = c.powf(-k) - 1.0;
    match variant {
        ScheduleVariant::ExtraPoint => 2.0 * k * grow / (1.0 - c),
        ScheduleVariant::ExtraMomentum => k * grow / (1.0 / c - 1.0),
    }
}
