//! Affine strongly monotone test problems with known solutions.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::singular_values;
use crate::rng::StreamRng;
use crate::vi::sets::gaussian_vector;
use crate::vi::{
    AffineMapping, FeasibleSet, GaussianNoiseOracle, Mapping, StochasticOracle, ViProblem,
};
use crate::zeroth_order::NoisyFunctionOracle;
use crate::Point;

fn random_orthogonal(dim: usize, rng: &mut StreamRng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    g.qr().q()
}

/// `F(z) = H(z - z*)` with known `z*`.
#[derive(Debug, Clone)]
pub struct QuadraticVi {
    pub mapping: Arc<AffineMapping>,
    pub z_star: Point,
}

impl QuadraticVi {
    /// Constants are computed from `h`.
    pub fn new(h: DMatrix<f64>, z_star: Point) -> Result<Self> {
        let offset = -(&h * &z_star);
        let mapping = AffineMapping::new(h, offset)?;
        if !(mapping.modulus() > 0.0) {
            return Err(Error::invalid("operator is not strongly monotone"));
        }
        Ok(QuadraticVi {
            mapping: Arc::new(mapping),
            z_star,
        })
    }

    /// `H = I + S` with `S` a random skew matrix of spectral norm `sqrt(κ² - 1)`,
    /// so `μ = 1` and `L = κ` exactly.
    pub fn random_skew(dim: usize, kappa: f64, z_star: Point, rng: &mut StreamRng) -> Result<Self> {
        check_target(dim, kappa, &z_star)?;
        if kappa > 1.0 && dim < 2 {
            return Err(Error::invalid("a skew part needs dimension at least 2"));
        }
        let mut h = DMatrix::identity(dim, dim);
        if kappa > 1.0 {
            let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
            let s = &g - g.transpose();
            let norm = singular_values(&s)?[0];
            h += s * ((kappa * kappa - 1.0).sqrt() / norm);
        }
        let offset = -(&h * &z_star);
        Ok(QuadraticVi {
            mapping: Arc::new(AffineMapping::with_constants(h, offset, 1.0, kappa)),
            z_star,
        })
    }

    /// `H = Q diag(1, ..., κ) Qᵀ` with eigenvalues evenly spaced, so `μ = 1`,
    /// `L = κ`.
    pub fn random_symmetric(
        dim: usize,
        kappa: f64,
        z_star: Point,
        rng: &mut StreamRng,
    ) -> Result<Self> {
        check_target(dim, kappa, &z_star)?;
        let q = random_orthogonal(dim, rng);
        let eig = DVector::from_fn(dim, |i, _| {
            if dim == 1 {
                1.0
            } else {
                1.0 + (kappa - 1.0) * i as f64 / (dim - 1) as f64
            }
        });
        let h = &q * DMatrix::from_diagonal(&eig) * q.transpose();
        let h = (&h + h.transpose()) * 0.5;
        let l = if dim == 1 { 1.0 } else { kappa };
        let offset = -(&h * &z_star);
        Ok(QuadraticVi {
            mapping: Arc::new(AffineMapping::with_constants(h, offset, 1.0, l)),
            z_star,
        })
    }

    pub fn modulus(&self) -> f64 {
        self.mapping.modulus()
    }

    pub fn lipschitz(&self) -> f64 {
        self.mapping.lipschitz()
    }

    /// The VI on `set` with additive Gaussian oracle noise of total variance
    /// `sigma2` (exact when 0). `z*` must lie in the set.
    pub fn problem(&self, set: Arc<dyn FeasibleSet>, sigma2: f64) -> Result<ViProblem> {
        if !set.contains(&self.z_star, 1e-12) {
            return Err(Error::invalid("solution lies outside the feasible set"));
        }
        let oracle: Arc<dyn StochasticOracle> = if sigma2 > 0.0 {
            Arc::new(GaussianNoiseOracle::new(self.mapping.clone(), sigma2))
        } else {
            Arc::new(crate::vi::ExactOracle::new(self.mapping.clone()))
        };
        ViProblem::new(set, oracle, self.modulus(), self.lipschitz())?
            .with_reference_solution(self.z_star.clone())
    }
}

fn check_target(dim: usize, kappa: f64, z_star: &Point) -> Result<()> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(Error::invalid(format!("condition number must be >= 1, got {kappa}")));
    }
    if z_star.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: z_star.len(),
        });
    }
    Ok(())
}

/// `f(x, y) = (μx/2)‖x - x*‖² + (x - x*)ᵀA(y - y*) - (μy/2)‖y - y*‖²`,
/// observed as `f̂ = f + ξxᵀx + ξyᵀy` with `ξx ~ N(0, σ²/n I)` and
/// `ξy ~ N(0, σ²/m I)`, so each noisy partial gradient has variance `σ²`.
#[derive(Debug, Clone)]
pub struct QuadraticSaddle {
    pub mu_x: f64,
    pub mu_y: f64,
    pub a: DMatrix<f64>,
    pub x_star: Point,
    pub y_star: Point,
    pub sigma2: f64,
    /// Radius of the ball around `(x*, y*)` on which `M` is evaluated.
    pub domain_radius: f64,
    operator: AffineMapping,
}

impl QuadraticSaddle {
    pub fn new(
        mu_x: f64,
        mu_y: f64,
        a: DMatrix<f64>,
        x_star: Point,
        y_star: Point,
        sigma2: f64,
        domain_radius: f64,
    ) -> Result<Self> {
        let (n, m) = (a.nrows(), a.ncols());
        if x_star.len() != n || y_star.len() != m {
            return Err(Error::DimensionMismatch {
                expected: n + m,
                found: x_star.len() + y_star.len(),
            });
        }
        if !(mu_x > 0.0 && mu_y > 0.0 && sigma2 >= 0.0 && domain_radius > 0.0) {
            return Err(Error::invalid("need positive moduli and radius, nonnegative noise"));
        }
        let mut h = DMatrix::zeros(n + m, n + m);
        h.view_mut((0, 0), (n, n)).fill_diagonal(mu_x);
        h.view_mut((n, n), (m, m)).fill_diagonal(mu_y);
        h.view_mut((0, n), (n, m)).copy_from(&a);
        h.view_mut((n, 0), (m, n)).copy_from(&(-a.transpose()));
        let mut z_star = Point::zeros(n + m);
        z_star.rows_mut(0, n).copy_from(&x_star);
        z_star.rows_mut(n, m).copy_from(&y_star);
        let offset = -(&h * &z_star);
        let lipschitz = singular_values(&h)?[0];
        let operator = AffineMapping::with_constants(h, offset, mu_x.min(mu_y), lipschitz);
        Ok(QuadraticSaddle {
            mu_x,
            mu_y,
            a,
            x_star,
            y_star,
            sigma2,
            domain_radius,
            operator,
        })
    }

    /// Equal moduli `μ = 1`, coupling `A` a random matrix scaled so that
    /// `κ = sqrt(1 + ‖A‖²)` hits `kappa`, and `‖z*‖ = R/2` so the solution
    /// sits inside the ball of radius `R` around the origin.
    pub fn random(
        n: usize,
        m: usize,
        kappa: f64,
        sigma2: f64,
        domain_radius: f64,
        rng: &mut StreamRng,
    ) -> Result<Self> {
        if !(kappa >= 1.0) {
            return Err(Error::invalid("condition number must be >= 1"));
        }
        let g = DMatrix::from_fn(n, m, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let norm = singular_values(&g)?[0];
        let a = g * ((kappa * kappa - 1.0).sqrt() / norm);
        let dir = gaussian_vector(n + m, rng);
        let z_star = &dir * (0.5 * domain_radius / dir.norm());
        let x_star = z_star.rows(0, n).into_owned();
        let y_star = z_star.rows(n, m).into_owned();
        QuadraticSaddle::new(1.0, 1.0, a, x_star, y_star, sigma2, domain_radius)
    }

    pub fn z_star(&self) -> Point {
        self.joint(&self.x_star, &self.y_star)
    }

    fn joint(&self, x: &Point, y: &Point) -> Point {
        let n = x.len();
        let mut z = Point::zeros(n + y.len());
        z.rows_mut(0, n).copy_from(x);
        z.rows_mut(n, y.len()).copy_from(y);
        z
    }

    pub fn dim(&self) -> usize {
        self.a.nrows() + self.a.ncols()
    }

    pub fn operator(&self) -> &AffineMapping {
        &self.operator
    }

    pub fn mean(&self, x: &Point, y: &Point) -> f64 {
        let dx = x - &self.x_star;
        let dy = y - &self.y_star;
        0.5 * self.mu_x * dx.norm_squared() + dx.dot(&(&self.a * &dy)) - 0.5 * self.mu_y * dy.norm_squared()
    }
}

impl NoisyFunctionOracle for QuadraticSaddle {
    fn dims(&self) -> (usize, usize) {
        (self.a.nrows(), self.a.ncols())
    }

    fn evaluate_shared(&self, queries: &[(&Point, &Point)], rng: &mut StreamRng) -> Result<Vec<f64>> {
        let (n, m) = self.dims();
        let noise = if self.sigma2 > 0.0 {
            Some((
                gaussian_vector(n, rng) * (self.sigma2 / n as f64).sqrt(),
                gaussian_vector(m, rng) * (self.sigma2 / m as f64).sqrt(),
            ))
        } else {
            None
        };
        queries
            .iter()
            .map(|(x, y)| {
                if x.len() != n || y.len() != m {
                    return Err(Error::DimensionMismatch {
                        expected: n + m,
                        found: x.len() + y.len(),
                    });
                }
                let mut f = self.mean(x, y);
                if let Some((xi_x, xi_y)) = &noise {
                    f += xi_x.dot(x) + xi_y.dot(y);
                }
                Ok(f)
            })
            .collect()
    }

    /// `sup ‖H(z - z*)‖ = L·R` over the ball of radius `R` bounds both
    /// partial-gradient norms.
    fn value_lipschitz(&self) -> f64 {
        self.operator.lipschitz() * self.domain_radius
    }

    fn gradient_noise(&self) -> f64 {
        self.sigma2
    }

    fn smoothness(&self) -> f64 {
        self.operator.lipschitz()
    }

    fn mean_value(&self, x: &Point, y: &Point) -> Option<f64> {
        Some(self.mean(x, y))
    }

    fn saddle_operator(&self) -> Option<&dyn Mapping> {
        Some(&self.operator)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::vi::{verify_lipschitz, verify_monotonicity, Ball, EuclideanSpace};

    #[test]
    fn random_skew_has_exact_constants() {
        let mut r = rng::stream(1, 0);
        let q = QuadraticVi::random_skew(6, 10.0, Point::from_element(6, 0.2), &mut r).unwrap();
        let h = &q.mapping.matrix;
        let s = singular_values(h).unwrap();
        assert!((s[0] - 10.0).abs() < 1e-10);
        let e = crate::linalg::symmetric_eigenvalues(h).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-12);
        let set = EuclideanSpace::new(6);
        let mut p = rng::stream(1, 1);
        assert!(verify_monotonicity(q.mapping.as_ref(), &set, 500, &mut p).unwrap().pass);
        assert!(verify_lipschitz(q.mapping.as_ref(), &set, 500, &mut p).unwrap().pass);
        assert!(q.mapping.evaluate(&q.z_star).norm() < 1e-14);
    }

    #[test]
    fn random_symmetric_has_exact_constants() {
        let mut r = rng::stream(2, 0);
        let q = QuadraticVi::random_symmetric(5, 4.0, Point::zeros(5), &mut r).unwrap();
        let e = crate::linalg::symmetric_eigenvalues(&q.mapping.matrix).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[4] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn problem_rejects_infeasible_solution() {
        let mut r = rng::stream(3, 0);
        let q = QuadraticVi::random_skew(2, 2.0, Point::from_element(2, 5.0), &mut r).unwrap();
        assert!(q.problem(Arc::new(Ball::unit(2)), 0.0).is_err());
        assert!(q.problem(Arc::new(EuclideanSpace::new(2)), 0.0).is_ok());
    }

    #[test]
    fn saddle_operator_matches_gradients() {
        let mut r = rng::stream(4, 0);
        let s = QuadraticSaddle::random(3, 4, 5.0, 0.0, 2.0, &mut r).unwrap();
        assert!((s.operator().lipschitz() - 5.0).abs() < 1e-10);
        let x = gaussian_vector(3, &mut r);
        let y = gaussian_vector(4, &mut r);
        let mut z = Point::zeros(7);
        z.rows_mut(0, 3).copy_from(&x);
        z.rows_mut(3, 4).copy_from(&y);
        let g = s.operator().evaluate(&z);
        let gx = (&x - &s.x_star) * s.mu_x + &s.a * (&y - &s.y_star);
        let gy = s.a.transpose() * (&x - &s.x_star) - (&y - &s.y_star) * s.mu_y;
        assert!((g.rows(0, 3) - gx).norm() < 1e-12);
        assert!((g.rows(3, 4) + gy).norm() < 1e-12);
        assert!(s.operator().evaluate(&s.z_star()).norm() < 1e-12);
    }
}
