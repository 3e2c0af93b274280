use nalgebra::DVector;
use rand::Rng;
use rand_distr::Exp1;

use crate::rng::StreamRng;
use crate::vi::FeasibleSet;
use crate::Point;

/// Euclidean projection onto `{z >= 0, Σ z_i = 1}` by sorting and
/// thresholding.
pub fn project_simplex(v: &Point) -> Point {
    let n = v.len();
    assert!(n > 0, "cannot project onto an empty simplex");
    let mut sorted: Vec<f64> = v.iter().copied().collect();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let candidate = (cumulative - 1.0) / (j as f64 + 1.0);
        if s - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    v.map(|x| (x - theta).max(0.0))
}

/// The probability simplex in `R^dim`.
#[derive(Debug, Clone, Copy)]
pub struct SimplexSet {
    dim: usize,
}

impl SimplexSet {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "simplex dimension must be positive");
        SimplexSet { dim }
    }

    pub fn uniform(&self) -> Point {
        DVector::from_element(self.dim, 1.0 / self.dim as f64)
    }
}

impl FeasibleSet for SimplexSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn project(&self, z: &Point) -> Point {
        project_simplex(z)
    }

    fn diameter(&self) -> f64 {
        if self.dim == 1 {
            0.0
        } else {
            2f64.sqrt()
        }
    }

    /// Uniform on the simplex (flat Dirichlet).
    fn sample_point(&self, rng: &mut StreamRng) -> Point {
        let e: Point = DVector::from_fn(self.dim, |_, _| rng.sample::<f64, _>(Exp1));
        let s = e.sum();
        e / s
    }
}
