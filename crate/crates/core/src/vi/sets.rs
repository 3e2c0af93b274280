use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::StreamRng;
use crate::Point;

/// A closed convex set with a Euclidean projection.
pub trait FeasibleSet: Send + Sync {
    fn dim(&self) -> usize;

    fn project(&self, z: &Point) -> Point;

    /// Upper bound `D` on the distance between any two points of the set.
    /// Unbounded sets report `f64::INFINITY`.
    fn diameter(&self) -> f64;

    /// A random point of the set, used for probing contracts.
    fn sample_point(&self, rng: &mut StreamRng) -> Point;

    fn contains(&self, z: &Point, tol: f64) -> bool {
        let p = self.project(z);
        (p - z).norm() <= tol
    }
}

pub(crate) fn gaussian_vector(dim: usize, rng: &mut StreamRng) -> Point {
    DVector::from_fn(dim, |_, _| rng.sample(StandardNormal))
}

/// All of `R^n`; projection is the identity.
#[derive(Debug, Clone)]
pub struct EuclideanSpace {
    dim: usize,
    probe_scale: f64,
}

impl EuclideanSpace {
    pub fn new(dim: usize) -> Self {
        EuclideanSpace {
            dim,
            probe_scale: 1.0,
        }
    }

    /// Standard deviation of the Gaussian used by [`FeasibleSet::sample_point`].
    pub fn with_probe_scale(mut self, scale: f64) -> Self {
        self.probe_scale = scale;
        self
    }
}

impl FeasibleSet for EuclideanSpace {
    fn dim(&self) -> usize {
        self.dim
    }

    fn project(&self, z: &Point) -> Point {
        z.clone()
    }

    fn diameter(&self) -> f64 {
        f64::INFINITY
    }

    fn sample_point(&self, rng: &mut StreamRng) -> Point {
        gaussian_vector(self.dim, rng) * self.probe_scale
    }
}

/// Closed Euclidean ball.
#[derive(Debug, Clone)]
pub struct Ball {
    center: Point,
    radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Self {
        assert!(radius > 0.0, "ball radius must be positive");
        Ball { center, radius }
    }

    pub fn unit(dim: usize) -> Self {
        Ball::new(DVector::zeros(dim), 1.0)
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl FeasibleSet for Ball {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn project(&self, z: &Point) -> Point {
        let offset = z - &self.center;
        let norm = offset.norm();
        if norm <= self.radius {
            z.clone()
        } else {
            &self.center + offset * (self.radius / norm)
        }
    }

    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    fn sample_point(&self, rng: &mut StreamRng) -> Point {
        // uniform in the ball: direction times radius * U^(1/n)
        let dir = gaussian_vector(self.dim(), rng);
        let norm = dir.norm().max(f64::MIN_POSITIVE);
        let u: f64 = rng.random();
        let r = self.radius * u.powf(1.0 / self.dim() as f64);
        &self.center + dir * (r / norm)
    }
}

/// Cartesian product of sets, acting on the concatenated coordinates.
#[derive(Clone)]
pub struct ProductSet {
    parts: Vec<Arc<dyn FeasibleSet>>,
}

impl ProductSet {
    pub fn new(parts: Vec<Arc<dyn FeasibleSet>>) -> Self {
        ProductSet { parts }
    }

    pub fn parts(&self) -> &[Arc<dyn FeasibleSet>] {
        &self.parts
    }
}

impl FeasibleSet for ProductSet {
    fn dim(&self) -> usize {
        self.parts.iter().map(|p| p.dim()).sum()
    }

    fn project(&self, z: &Point) -> Point {
        let mut out = DVector::zeros(z.len());
        let mut offset = 0;
        for part in &self.parts {
            let d = part.dim();
            let block = z.rows(offset, d).into_owned();
            out.rows_mut(offset, d).copy_from(&part.project(&block));
            offset += d;
        }
        out
    }

    fn diameter(&self) -> f64 {
        self.parts
            .iter()
            .map(|p| p.diameter().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn sample_point(&self, rng: &mut StreamRng) -> Point {
        let blocks: Vec<Point> = self.parts.iter().map(|p| p.sample_point(rng)).collect();
        let mut out = DVector::zeros(self.dim());
        let mut offset = 0;
        for b in blocks {
            out.rows_mut(offset, b.len()).copy_from(&b);
            offset += b.len();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn ball_projection_scales_outside_points() {
        let b = Ball::unit(2);
        let p = b.project(&DVector::from_vec(vec![3.0, 4.0]));
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
        let inside = DVector::from_vec(vec![0.1, -0.2]);
        assert_eq!(b.project(&inside), inside);
    }

    #[test]
    fn ball_samples_inside() {
        let b = Ball::new(DVector::from_vec(vec![1.0, 1.0, 1.0]), 0.5);
        let mut r = rng::stream(3, 0);
        for _ in 0..200 {
            let z = b.sample_point(&mut r);
            assert!((z - b.center()).norm() <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn product_diameter_combines_parts() {
        let set = ProductSet::new(vec![Arc::new(Ball::unit(2)), Arc::new(Ball::unit(3))]);
        assert_eq!(set.dim(), 5);
        assert!((set.diameter() - 8f64.sqrt()).abs() < 1e-15);
    }
}
