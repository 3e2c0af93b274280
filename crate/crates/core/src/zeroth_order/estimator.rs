//! Sphere-smoothed finite-difference gradients of a noisy saddle function.

use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::schemes::Estimate;
use crate::vi::sets::gaussian_vector;
use crate::vi::Mapping;
use crate::Point;

/// Black-box access to `f̂(x, y, ξ)`, convex in `x` and concave in `y`.
///
/// `M` bounds the Lipschitz constant of `f̂(·, y, ξ)` and `f̂(x, ·, ξ)`, `σ²`
/// bounds the variance of the noisy partial gradients and `L` the Lipschitz
/// constant of the gradient.
pub trait NoisyFunctionOracle: Send + Sync {
    /// `(n, m)`: dimensions of `x` and `y`.
    fn dims(&self) -> (usize, usize);

    /// Evaluates `f̂(x_i, y_i, ξ)` for every query under one shared draw `ξ`.
    fn evaluate_shared(&self, queries: &[(&Point, &Point)], rng: &mut StreamRng) -> Result<Vec<f64>>;

    fn evaluate(&self, x: &Point, y: &Point, rng: &mut StreamRng) -> Result<f64> {
        Ok(self.evaluate_shared(&[(x, y)], rng)?[0])
    }

    fn value_lipschitz(&self) -> f64;

    fn gradient_noise(&self) -> f64;

    fn smoothness(&self) -> f64;

    /// `f(x, y) = E f̂(x, y, ξ)` when known.
    fn mean_value(&self, _x: &Point, _y: &Point) -> Option<f64> {
        None
    }

    /// The saddle operator `(∇_x f; -∇_y f)` when known.
    fn saddle_operator(&self) -> Option<&dyn Mapping> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingParams {
    pub rho_x: f64,
    pub rho_y: f64,
}

impl SmoothingParams {
    pub fn new(rho_x: f64, rho_y: f64) -> Result<Self> {
        if !(rho_x > 0.0 && rho_y > 0.0 && rho_x.is_finite() && rho_y.is_finite()) {
            return Err(Error::invalid(format!(
                "smoothing radii must be positive, got ({rho_x}, {rho_y})"
            )));
        }
        Ok(SmoothingParams { rho_x, rho_y })
    }
}

/// Uniform direction on the unit sphere of `R^dim`, by normalising a
/// standard Gaussian vector.
pub fn sample_unit_sphere(dim: usize, rng: &mut StreamRng) -> Result<Point> {
    if dim == 0 {
        return Err(Error::invalid("sphere dimension must be at least 1"));
    }
    loop {
        let g = gaussian_vector(dim, rng);
        let norm = g.norm();
        if norm > 0.0 && norm.is_finite() {
            return Ok(g / norm);
        }
    }
}

pub(crate) fn split_point(z: &Point, n: usize, m: usize) -> Result<(Point, Point)> {
    if z.len() != n + m {
        return Err(Error::DimensionMismatch {
            expected: n + m,
            found: z.len(),
        });
    }
    Ok((z.rows(0, n).into_owned(), z.rows(n, m).into_owned()))
}

/// One draw of `(F_ρx; -F_ρy)` with
/// `F_ρx = (n/ρx)(f̂(x+ρx u, y, ξ) - f̂(x, y, ξ)) u` and
/// `F_ρy = (m/ρy)(f̂(x, y+ρy v, ξ) - f̂(x, y, ξ)) v`.
///
/// The three evaluations share `ξ`; the base evaluation is shared by
/// both blocks.
pub fn zeroth_order_gradient(
    oracle: &dyn NoisyFunctionOracle,
    z: &Point,
    s: &SmoothingParams,
    rng: &mut StreamRng,
) -> Result<Point> {
    let (n, m) = oracle.dims();
    let (x, y) = split_point(z, n, m)?;
    let mut out = Point::zeros(n + m);
    accumulate_draw(oracle, &x, &y, s, &mut out, rng)?;
    Ok(out)
}

fn accumulate_draw(
    oracle: &dyn NoisyFunctionOracle,
    x: &Point,
    y: &Point,
    s: &SmoothingParams,
    out: &mut Point,
    rng: &mut StreamRng,
) -> Result<()> {
    let (n, m) = (x.len(), y.len());
    let u = sample_unit_sphere(n, rng)?;
    let v = sample_unit_sphere(m, rng)?;
    let xp = x + &u * s.rho_x;
    let yp = y + &v * s.rho_y;
    let f = oracle.evaluate_shared(&[(x, y), (&xp, y), (x, &yp)], rng)?;
    let cx = n as f64 / s.rho_x * (f[1] - f[0]);
    let cy = -(m as f64) / s.rho_y * (f[2] - f[0]);
    out.rows_mut(0, n).axpy(cx, &u, 1.0);
    out.rows_mut(n, m).axpy(cy, &v, 1.0);
    Ok(())
}

/// Mean of `t` independent draws of [`zeroth_order_gradient`].
pub fn batched_zeroth_order_gradient(
    oracle: &dyn NoisyFunctionOracle,
    z: &Point,
    s: &SmoothingParams,
    t: u64,
    rng: &mut StreamRng,
) -> Result<Estimate> {
    if t == 0 {
        return Err(Error::invalid("batch size must be at least 1"));
    }
    let (n, m) = oracle.dims();
    let (x, y) = split_point(z, n, m)?;
    let mut sum = Point::zeros(n + m);
    for _ in 0..t {
        accumulate_draw(oracle, &x, &y, s, &mut sum, rng)?;
    }
    Ok(Estimate {
        value: sum / t as f64,
        samples: t,
        evaluations: 3 * t,
    })
}

/// `2·max{nM² + nσ² + n²ρx²L², mM² + mσ² + m²ρy²L²}`.
pub fn sigma_tilde(
    n: usize,
    m: usize,
    value_lipschitz: f64,
    sigma2: f64,
    rho_x: f64,
    rho_y: f64,
    smoothness: f64,
) -> f64 {
    let branch = |d: usize, rho: f64| {
        let d = d as f64;
        d * value_lipschitz * value_lipschitz + d * sigma2 + d * d * rho * rho * smoothness * smoothness
    };
    2.0 * branch(n, rho_x).max(branch(m, rho_y))
}

/// [`sigma_tilde`] with the constants an oracle declares.
pub fn sigma_tilde_for(oracle: &dyn NoisyFunctionOracle, s: &SmoothingParams) -> f64 {
    let (n, m) = oracle.dims();
    sigma_tilde(
        n,
        m,
        oracle.value_lipschitz(),
        oracle.gradient_noise(),
        s.rho_x,
        s.rho_y,
        oracle.smoothness(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    struct Constant;
    impl NoisyFunctionOracle for Constant {
        fn dims(&self) -> (usize, usize) {
            (3, 2)
        }
        fn evaluate_shared(&self, q: &[(&Point, &Point)], _: &mut StreamRng) -> Result<Vec<f64>> {
            Ok(vec![4.2; q.len()])
        }
        fn value_lipschitz(&self) -> f64 {
            0.0
        }
        fn gradient_noise(&self) -> f64 {
            0.0
        }
        fn smoothness(&self) -> f64 {
            0.0
        }
    }

    #[test]
    fn sphere_samples_have_unit_norm() {
        let mut r = rng::stream(1, 0);
        for d in 1..8 {
            let u = sample_unit_sphere(d, &mut r).unwrap();
            assert!((u.norm() - 1.0).abs() < 1e-12);
        }
        assert!(sample_unit_sphere(0, &mut r).is_err());
    }

    #[test]
    fn constant_function_has_zero_estimate() {
        let mut r = rng::stream(2, 0);
        let s = SmoothingParams::new(0.1, 0.2).unwrap();
        let z = Point::from_element(5, 0.3);
        assert_eq!(zeroth_order_gradient(&Constant, &z, &s, &mut r).unwrap(), Point::zeros(5));
        let e = batched_zeroth_order_gradient(&Constant, &z, &s, 17, &mut r).unwrap();
        assert_eq!(e.value, Point::zeros(5));
        assert_eq!((e.samples, e.evaluations), (17, 51));
        assert!(batched_zeroth_order_gradient(&Constant, &z, &s, 0, &mut r).is_err());
        assert!(zeroth_order_gradient(&Constant, &Point::zeros(4), &s, &mut r).is_err());
    }

    #[test]
    fn singleton_batch_equals_single_draw() {
        let s = SmoothingParams::new(0.1, 0.1).unwrap();
        let z = Point::from_element(5, 0.3);
        let a = zeroth_order_gradient(&Constant, &z, &s, &mut rng::stream(3, 1)).unwrap();
        let b = batched_zeroth_order_gradient(&Constant, &z, &s, 1, &mut rng::stream(3, 1)).unwrap();
        assert_eq!(a, b.value);
    }

    #[test]
    fn sigma_tilde_examples() {
        assert_eq!(sigma_tilde(1, 1, 1.0, 0.0, 0.0, 0.0, 1.0), 2.0);
        let a = sigma_tilde(4, 4, 0.7, 0.3, 0.05, 0.05, 2.0);
        assert!((a - 2.0 * (4.0 * 0.49 + 4.0 * 0.3 + 16.0 * 0.0025 * 4.0)).abs() < 1e-14);
        assert_eq!(sigma_tilde(3, 7, 1.0, 0.5, 0.0, 0.0, 9.0), 2.0 * 7.0 * 1.5);
        assert!(SmoothingParams::new(0.0, 1.0).is_err());
    }
}
