//! Scheme parameters, their validity conditions and the recommended defaults.

use serde::{Deserialize, Serialize};

/// Absolute slack on the step-size budget inequality, which is non-strict.
const BUDGET_SLACK: f64 = 1e-12;
/// Relative tolerance on the `alpha / tau` equality of extra-momentum.
const RATIO_TOL: f64 = 1e-12;

/// `(alpha, beta, gamma, eta, tau)` of the extra-point scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtraPointParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
    pub tau: f64,
}

impl ExtraPointParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, eta: f64, tau: f64) -> Self {
        ExtraPointParams {
            alpha,
            beta,
            gamma,
            eta,
            tau,
        }
    }

    /// Plain extra-gradient: no momentum, no optimism, `eta = alpha`.
    pub fn extra_gradient(alpha: f64) -> Self {
        ExtraPointParams::new(alpha, 0.0, 0.0, alpha, 0.0)
    }

    /// Derived quantities `t1, t2, t3, q`.
    pub fn t_parameters(&self, mu: f64, lipschitz: f64) -> TParameters {
        let gb = (self.gamma - self.beta).abs();
        let t1 = self.alpha * mu - 4.0 * self.gamma - 6.0 * gb - 4.0 * self.tau * lipschitz;
        let t2 = 2.0 * gb + 2.0 * self.gamma + 4.0 * self.tau * lipschitz;
        let t3 = 4.0 * gb + self.tau * lipschitz;
        TParameters {
            t1,
            t2,
            t3,
            q: 2.0 * (1.0 - t3) / (t1 - t2 - t3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TParameters {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub q: f64,
}

impl TParameters {
    /// `a = (t1 - t3)/(1 - t3)`, `b = t2/(1 - t3)` of the two-step recursion.
    pub fn recursion_coefficients(&self) -> (f64, f64) {
        let s = 1.0 - self.t3;
        ((self.t1 - self.t3) / s, self.t2 / s)
    }

    /// Per-iteration contraction factor `1 - (a - b)/2 = 1 - 1/q`.
    pub fn contraction(&self) -> f64 {
        let (a, b) = self.recursion_coefficients();
        1.0 - (a - b) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtraPointVerdict {
    pub t: TParameters,
    pub valid: bool,
    pub violated: Vec<&'static str>,
}

pub const EP_NONNEGATIVE: &str = "nonnegative parameters";
pub const EP_ETA_EQUALS_ALPHA: &str = "eta = alpha";
pub const EP_STEP_BUDGET: &str = "2a^2L^2 + 2|g-b| + 2g + 2a*mu <= 1";
pub const EP_T3_NONNEGATIVE: &str = "0 <= t3";
pub const EP_T3_BELOW_T1: &str = "t3 < t1";
pub const EP_T1_BELOW_ONE: &str = "t1 < 1";
pub const EP_T2_MARGIN: &str = "t2 < t1 - t3";

pub fn check_extra_point_conditions(
    p: &ExtraPointParams,
    mu: f64,
    lipschitz: f64,
) -> ExtraPointVerdict {
    let t = p.t_parameters(mu, lipschitz);
    let mut violated = Vec::new();
    let all = [p.alpha, p.beta, p.gamma, p.eta, p.tau];
    if all.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        violated.push(EP_NONNEGATIVE);
    }
    if p.eta != p.alpha {
        violated.push(EP_ETA_EQUALS_ALPHA);
    }
    let budget = 2.0 * p.alpha * p.alpha * lipschitz * lipschitz
        + 2.0 * (p.gamma - p.beta).abs()
        + 2.0 * p.gamma
        + 2.0 * p.alpha * mu
        - 1.0;
    if !(budget <= BUDGET_SLACK) {
        violated.push(EP_STEP_BUDGET);
    }
    if !(t.t3 >= 0.0) {
        violated.push(EP_T3_NONNEGATIVE);
    }
    if !(t.t3 < t.t1) {
        violated.push(EP_T3_BELOW_T1);
    }
    if !(t.t1 < 1.0) {
        violated.push(EP_T1_BELOW_ONE);
    }
    if !(t.t2 < t.t1 - t.t3) {
        violated.push(EP_T2_MARGIN);
    }
    ExtraPointVerdict {
        t,
        valid: violated.is_empty(),
        violated,
    }
}

/// `(alpha, gamma, tau)` of the extra-momentum scheme and the rate constant `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtraMomentumParams {
    pub alpha: f64,
    pub gamma: f64,
    pub tau: f64,
    pub theta: f64,
}

impl ExtraMomentumParams {
    pub fn new(alpha: f64, gamma: f64, tau: f64, theta: f64) -> Self {
        ExtraMomentumParams {
            alpha,
            gamma,
            tau,
            theta,
        }
    }

    /// Optimistic gradient descent-ascent: `gamma = 0`, `tau = alpha`. This
    /// breaks the `alpha / tau` condition, so it only runs with validation
    /// overridden. `theta` is kept only for bookkeeping.
    pub fn ogda(alpha: f64) -> Self {
        ExtraMomentumParams::new(alpha, 0.0, alpha, f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtraMomentumVerdict {
    pub valid: bool,
    pub violated: Vec<&'static str>,
    /// `1 + theta / kappa`, the required per-step contraction.
    pub target: f64,
    /// `1 + alpha*mu - gamma`.
    pub monotonicity_margin: f64,
    /// `alpha / tau`.
    pub ratio: f64,
    /// `1 / (8 tau^2 L^2 + 2 gamma)`.
    pub displacement_margin: f64,
}

pub const EM_NONNEGATIVE: &str = "nonnegative parameters";
pub const EM_THETA_RANGE: &str = "theta in (0, 1]";
pub const EM_MONOTONICITY: &str = "1 + alpha*mu - gamma >= 1 + theta/kappa";
pub const EM_RATIO: &str = "alpha/tau ratio";
pub const EM_DISPLACEMENT: &str = "1/(8 tau^2 L^2 + 2 gamma) >= 1 + theta/kappa";

pub fn check_extra_momentum_conditions(
    p: &ExtraMomentumParams,
    mu: f64,
    lipschitz: f64,
) -> ExtraMomentumVerdict {
    let kappa = lipschitz / mu;
    let target = 1.0 + p.theta / kappa;
    let monotonicity_margin = 1.0 + p.alpha * mu - p.gamma;
    let ratio = p.alpha / p.tau;
    let displacement_margin =
        1.0 / (8.0 * p.tau * p.tau * lipschitz * lipschitz + 2.0 * p.gamma);

    let mut violated = Vec::new();
    if [p.alpha, p.gamma, p.tau]
        .iter()
        .any(|v| !(*v >= 0.0) || !v.is_finite())
    {
        violated.push(EM_NONNEGATIVE);
    }
    if !(p.theta > 0.0 && p.theta <= 1.0) {
        violated.push(EM_THETA_RANGE);
    }
    if !(monotonicity_margin >= target * (1.0 - RATIO_TOL)) {
        violated.push(EM_MONOTONICITY);
    }
    if !((ratio - target).abs() <= RATIO_TOL * target) {
        violated.push(EM_RATIO);
    }
    if !(displacement_margin >= target * (1.0 - RATIO_TOL)) {
        violated.push(EM_DISPLACEMENT);
    }
    ExtraMomentumVerdict {
        valid: violated.is_empty(),
        violated,
        target,
        monotonicity_margin,
        ratio,
        displacement_margin,
    }
}

/// `(1/(4L), 1/(64κ), 1/(64κ), 1/(4L), 1/(64Lκ))`.
pub fn default_extra_point_params(mu: f64, lipschitz: f64) -> ExtraPointParams {
    let kappa = lipschitz / mu;
    let alpha = 1.0 / (4.0 * lipschitz);
    let g = 1.0 / (64.0 * kappa);
    ExtraPointParams::new(alpha, g, g, alpha, 1.0 / (64.0 * lipschitz * kappa))
}

pub const DEFAULT_THETA: f64 = 0.125;

/// `alpha = 1/(4L)`, `tau = alpha/(1 + θ/κ)`, `gamma = 1/(8(κ + θ))`.
pub fn default_extra_momentum_params(mu: f64, lipschitz: f64, theta: f64) -> ExtraMomentumParams {
    let kappa = lipschitz / mu;
    let alpha = 1.0 / (4.0 * lipschitz);
    ExtraMomentumParams::new(
        alpha,
        1.0 / (8.0 * (kappa + theta)),
        alpha / (1.0 + theta / kappa),
        theta,
    )
}

/// Step sizes `2/((k+2)μ)` with momentum weights shrinking as their square.
pub fn diminishing_extra_point_params(k: usize, mu: f64, lipschitz: f64) -> ExtraPointParams {
    let kappa = lipschitz / mu;
    let alpha = 2.0 / ((k as f64 + 2.0) * mu);
    let g = alpha * alpha * mu * mu / 128.0;
    ExtraPointParams::new(alpha, g, g, alpha, alpha * alpha * mu / (128.0 * kappa))
}
