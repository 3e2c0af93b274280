//! Closed-form convergence bounds, the extra-momentum potential and the
//! two-step contraction certificate of the extra-point recursion.

use crate::schemes::params::{ExtraMomentumParams, ExtraPointParams, TParameters};
use crate::Point;

/// `δ·D`, treating `0·∞` (unbiased oracle on an unbounded set) as 0.
fn bias_diameter(delta: f64, diameter: f64) -> f64 {
    if delta == 0.0 {
        0.0
    } else {
        delta * diameter
    }
}

/// Bound for the recommended extra-point parameters:
/// `(1 - 1/(256κ))^k · (283/256)·d0 + (40σ²/(63L²) + 32δD/(63L))·256κ`.
pub fn theoretical_bound_extra_point(
    k: usize,
    d0: f64,
    kappa: f64,
    sigma2: f64,
    delta: f64,
    diameter: f64,
    lipschitz: f64,
) -> f64 {
    let rate = (1.0 - 1.0 / (256.0 * kappa)).powf(k as f64);
    let floor = (40.0 * sigma2 / (63.0 * lipschitz * lipschitz)
        + 32.0 * bias_diameter(delta, diameter) / (63.0 * lipschitz))
        * 256.0
        * kappa;
    rate * 283.0 / 256.0 * d0 + floor
}

/// Bound for any valid extra-point parameters, unrolled from the two-step
/// recursion `(1-t3) d_{k+1} <= (1-t1) d_k + t2 d_{k-1} + c' σ² + 2α δ D`.
pub fn general_extra_point_bound(
    k: usize,
    d0: f64,
    p: &ExtraPointParams,
    t: &TParameters,
    lipschitz: f64,
    sigma2: f64,
    delta: f64,
    diameter: f64,
) -> f64 {
    let (a, b) = t.recursion_coefficients();
    let s = 1.0 - t.t3;
    let c = 8.0 * (p.alpha * p.alpha + p.tau / lipschitz) / s;
    let d = 2.0 * p.alpha / s;
    let rate = (1.0 - (a - b) / 2.0).powf(k as f64);
    rate * (2.0 + a + b) / 2.0 * d0 + (c * sigma2 + d * bias_diameter(delta, diameter)) * 2.0 / (a - b)
}

/// `2(1+θ/κ)^{-k} d0 + (κ/θ + 1)·32τ²σ² + 2καδ²/(θμ)`.
#[allow(clippy::too_many_arguments)]
pub fn theoretical_bound_extra_momentum(
    k: usize,
    d0: f64,
    kappa: f64,
    theta: f64,
    tau: f64,
    alpha: f64,
    sigma2: f64,
    delta: f64,
    mu: f64,
) -> f64 {
    2.0 * (1.0 + theta / kappa).powf(-(k as f64)) * d0
        + (kappa / theta + 1.0) * 32.0 * tau * tau * sigma2
        + 2.0 * kappa * alpha * delta * delta / (theta * mu)
}

/// [`theoretical_bound_extra_momentum`] evaluated at a parameter set.
pub fn extra_momentum_bound_for(
    k: usize,
    d0: f64,
    p: &ExtraMomentumParams,
    mu: f64,
    lipschitz: f64,
    sigma2: f64,
    delta: f64,
) -> f64 {
    theoretical_bound_extra_momentum(
        k,
        d0,
        lipschitz / mu,
        p.theta,
        p.tau,
        p.alpha,
        sigma2,
        delta,
        mu,
    )
}

/// Noise floor of the recommended extra-momentum parameters:
/// `128σ²/(μ(8L+μ)) + 4δ²/μ²`.
pub fn extra_momentum_noise_floor(mu: f64, lipschitz: f64, sigma2: f64, delta: f64) -> f64 {
    128.0 * sigma2 / (mu * (8.0 * lipschitz + mu)) + 4.0 * delta * delta / (mu * mu)
}

/// `2(1 - 1/(8κ+1))^k d0` plus [`extra_momentum_noise_floor`].
pub fn recommended_extra_momentum_bound(
    k: usize,
    d0: f64,
    mu: f64,
    lipschitz: f64,
    sigma2: f64,
    delta: f64,
) -> f64 {
    let kappa = lipschitz / mu;
    2.0 * (1.0 - 1.0 / (8.0 * kappa + 1.0)).powf(k as f64) * d0
        + extra_momentum_noise_floor(mu, lipschitz, sigma2, delta)
}

/// `G = 2κ²D² + D²/64 + D² + 8σ²/μ² + σ²/(128L²)`.
pub fn sublinear_g(kappa: f64, diameter: f64, sigma2: f64, mu: f64) -> f64 {
    let d2 = diameter * diameter;
    let l = kappa * mu;
    2.0 * kappa * kappa * d2 + d2 / 64.0 + d2 + 8.0 * sigma2 / (mu * mu) + sigma2 / (128.0 * l * l)
}

/// `Q/(k+2) + 256δD/(93μ)` with `Q = max(133G/9, 2 d0)`; rate of the
/// diminishing step-size schedule.
pub fn sublinear_bound(
    k: usize,
    d0: f64,
    kappa: f64,
    sigma2: f64,
    diameter: f64,
    delta: f64,
    mu: f64,
) -> f64 {
    let q = (133.0 * sublinear_g(kappa, diameter, sigma2, mu) / 9.0).max(2.0 * d0);
    q / (k as f64 + 2.0) + 256.0 * bias_diameter(delta, diameter) / (93.0 * mu)
}

/// `V_k = ½‖z^k - z*‖² + τ(z^k - z*)ᵀ(F̂_{k-1} - F̂_k) + (2τ²L² + γ/2)‖z^k - z^{k-1}‖²`.
pub fn potential(
    z: &Point,
    z_prev: &Point,
    f_prev: &Point,
    f_curr: &Point,
    z_star: &Point,
    p: &ExtraMomentumParams,
    lipschitz: f64,
) -> f64 {
    let e = z - z_star;
    let disp = (z - z_prev).norm_squared();
    0.5 * e.norm_squared()
        + p.tau * e.dot(&(f_prev - f_curr))
        + (2.0 * p.tau * p.tau * lipschitz * lipschitz + p.gamma / 2.0) * disp
}

/// First `k` at which `d_{k+1} + ((a+b)/2) d_k <= (1-(a-b)/2)(d_k + ((a+b)/2) d_{k-1})`
/// fails by more than `rel_slack` of the right-hand side, with `d_{-1} = d_0`.
pub fn first_certificate_violation(
    distances: &[f64],
    t: &TParameters,
    rel_slack: f64,
) -> Option<usize> {
    let (a, b) = t.recursion_coefficients();
    let h = (a + b) / 2.0;
    let rho = 1.0 - (a - b) / 2.0;
    (0..distances.len().saturating_sub(1)).find(|&k| {
        let prev = if k == 0 { distances[0] } else { distances[k - 1] };
        let lhs = distances[k + 1] + h * distances[k];
        let rhs = rho * (distances[k] + h * prev);
        lhs > rhs + rel_slack * rhs.abs()
    })
}

/// First `k` at which `factor · V_{k+1} <= V_k` fails by more than
/// `rel_slack · |V_k|`.
pub fn first_potential_violation(potentials: &[f64], factor: f64, rel_slack: f64) -> Option<usize> {
    potentials
        .windows(2)
        .position(|w| factor * w[1] > w[0] + rel_slack * w[0].abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::params::{default_extra_point_params, ExtraMomentumParams};

    #[test]
    fn extra_point_bound_examples() {
        assert!((theoretical_bound_extra_point(0, 2.0, 5.0, 0.0, 0.0, 1.0, 5.0) - 2.0 * 283.0 / 256.0).abs() < 1e-15);
        // k = 256κ ln(283/256 · d0/ε) gets below ε
        let (kappa, d0, eps) = (3.0_f64, 1.0_f64, 1e-3_f64);
        let k = (256.0 * kappa * (283.0 / 256.0 * d0 / eps).ln()).ceil() as usize;
        assert!(theoretical_bound_extra_point(k, d0, kappa, 0.0, 0.0, 1.0, 3.0) <= eps);
        // unbiased oracle on an unbounded set keeps a finite floor
        assert!(theoretical_bound_extra_point(3, 1.0, 1.0, 1.0, 0.0, f64::INFINITY, 1.0).is_finite());
    }

    #[test]
    fn general_bound_is_tighter_than_recommended_form() {
        for &kappa in &[1.0, 10.0, 100.0] {
            let p = default_extra_point_params(1.0, kappa);
            let t = p.t_parameters(1.0, kappa);
            for &k in &[0usize, 10, 1000] {
                let g = general_extra_point_bound(k, 1.0, &p, &t, kappa, 0.0, 0.0, 1.0);
                let r = theoretical_bound_extra_point(k, 1.0, kappa, 0.0, 0.0, 1.0, kappa);
                assert!(g <= r * (1.0 + 1e-12), "kappa {kappa} k {k}: {g} > {r}");
            }
        }
    }

    #[test]
    fn extra_momentum_forms_agree() {
        let (mu, l, theta) = (0.5, 7.0, 0.125);
        let kappa = l / mu;
        let alpha = 1.0 / (4.0 * l);
        let p = ExtraMomentumParams::new(alpha, 1.0 / (8.0 * (kappa + theta)), alpha / (1.0 + theta / kappa), theta);
        for k in [0usize, 3, 50] {
            let a = extra_momentum_bound_for(k, 1.3, &p, mu, l, 0.4, 0.2);
            let b = recommended_extra_momentum_bound(k, 1.3, mu, l, 0.4, 0.2);
            assert!((a - b).abs() < 1e-12 * b, "{a} vs {b}");
        }
        assert_eq!(theoretical_bound_extra_momentum(0, 1.5, 4.0, 0.125, 0.1, 0.1, 0.0, 0.0, 1.0), 3.0);
    }

    #[test]
    fn sublinear_examples() {
        assert!((sublinear_g(1.0, 1.0, 0.0, 1.0) - (2.0 + 1.0 / 64.0 + 1.0)).abs() < 1e-15);
        let b0 = sublinear_bound(0, 0.7, 1.0, 0.0, 1.0, 0.0, 1.0);
        assert!(b0 >= 0.7);
        let b = sublinear_bound(98, 0.7, 1.0, 0.0, 1.0, 0.0, 1.0);
        assert!((b0 / b - 50.0).abs() < 1e-12);
    }

    #[test]
    fn certificate_detects_growth() {
        let t = default_extra_point_params(1.0, 1.0).t_parameters(1.0, 1.0);
        let rho = t.contraction();
        let decaying: Vec<f64> = (0..50).map(|k| (rho / 2.0).powi(k)).collect();
        assert_eq!(first_certificate_violation(&decaying, &t, 1e-9), None);
        let mut bad = decaying.clone();
        bad[10] = 1.0;
        assert_eq!(first_certificate_violation(&bad, &t, 1e-9), Some(9));
        assert_eq!(first_potential_violation(&[4.0, 2.0, 1.0], 2.0, 1e-9), None);
        assert_eq!(first_potential_violation(&[4.0, 2.0, 1.5], 2.0, 1e-9), Some(1));
    }
}
