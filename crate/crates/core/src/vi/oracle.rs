use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::vi::sets::gaussian_vector;
use crate::Point;

/// A deterministic mapping `F` with its strong-monotonicity modulus and
/// Lipschitz constant.
pub trait Mapping: Send + Sync {
    fn dim(&self) -> usize;

    fn evaluate(&self, z: &Point) -> Point;

    /// `mu` in `(F(z) - F(z'))ᵀ(z - z') >= mu ||z - z'||²`.
    fn modulus(&self) -> f64;

    /// `L` in `||F(z) - F(z')|| <= L ||z - z'||`.
    fn lipschitz(&self) -> f64;
}

/// A sampled mapping `F̂(z, ξ)`.
///
/// `declared_bias` bounds `E||F̂(z,ξ) - F(z)||` and `declared_variance` bounds
/// `E||F̂(z,ξ) - F(z)||²`, uniformly over the feasible set. Noise must be
/// independent across calls given the rng stream.
pub trait StochasticOracle: Send + Sync {
    fn dim(&self) -> usize;

    fn sample(&self, z: &Point, rng: &mut StreamRng) -> Result<Point>;

    fn declared_bias(&self) -> f64;

    fn declared_variance(&self) -> f64;

    /// Bound on `||E[F̂(z,ξ)] - F(z)||`, the only part of the deviation that
    /// survives conditional expectation in the convergence bounds. Defaults
    /// to `declared_bias`.
    fn systematic_bias(&self) -> f64 {
        self.declared_bias()
    }

    fn mean_mapping(&self) -> Option<&dyn Mapping> {
        None
    }
}

/// `F(z) = H z + b`.
#[derive(Debug, Clone)]
pub struct AffineMapping {
    pub matrix: DMatrix<f64>,
    pub offset: DVector<f64>,
    modulus: f64,
    lipschitz: f64,
}

impl AffineMapping {
    /// Computes `mu` as the smallest eigenvalue of the symmetric part of `H`
    /// and `L` as the largest singular value of `H`.
    pub fn new(matrix: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != offset.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: offset.len(),
            });
        }
        let modulus = crate::linalg::symmetric_eigenvalues(&matrix)?[0];
        let lipschitz = crate::linalg::singular_values(&matrix)?[0];
        Ok(AffineMapping {
            matrix,
            offset,
            modulus,
            lipschitz,
        })
    }

    /// Uses caller-supplied constants instead of computing them.
    pub fn with_constants(
        matrix: DMatrix<f64>,
        offset: DVector<f64>,
        modulus: f64,
        lipschitz: f64,
    ) -> Self {
        AffineMapping {
            matrix,
            offset,
            modulus,
            lipschitz,
        }
    }
}

impl Mapping for AffineMapping {
    fn dim(&self) -> usize {
        self.offset.len()
    }

    fn evaluate(&self, z: &Point) -> Point {
        &self.matrix * z + &self.offset
    }

    fn modulus(&self) -> f64 {
        self.modulus
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// A mapping given by a closure and declared constants.
pub struct FnMapping<F> {
    dim: usize,
    f: F,
    modulus: f64,
    lipschitz: f64,
}

impl<F> FnMapping<F>
where
    F: Fn(&Point) -> Point + Send + Sync,
{
    pub fn new(dim: usize, modulus: f64, lipschitz: f64, f: F) -> Self {
        FnMapping {
            dim,
            f,
            modulus,
            lipschitz,
        }
    }
}

impl<F> Mapping for FnMapping<F>
where
    F: Fn(&Point) -> Point + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, z: &Point) -> Point {
        (self.f)(z)
    }

    fn modulus(&self) -> f64 {
        self.modulus
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// `F̂ = F`.
#[derive(Clone)]
pub struct ExactOracle {
    mapping: Arc<dyn Mapping>,
}

impl ExactOracle {
    pub fn new(mapping: Arc<dyn Mapping>) -> Self {
        ExactOracle { mapping }
    }
}

impl StochasticOracle for ExactOracle {
    fn dim(&self) -> usize {
        self.mapping.dim()
    }

    fn sample(&self, z: &Point, _rng: &mut StreamRng) -> Result<Point> {
        Ok(self.mapping.evaluate(z))
    }

    fn declared_bias(&self) -> f64 {
        0.0
    }

    fn declared_variance(&self) -> f64 {
        0.0
    }

    fn mean_mapping(&self) -> Option<&dyn Mapping> {
        Some(self.mapping.as_ref())
    }
}

/// `F̂(z) = F(z) + c + ε` with `ε ~ N(0, (σ²/n) I)` and an optional constant
/// offset `c`.
///
/// By default the declared bias is the Jensen bound `sqrt(σ² + ||c||²)` and
/// the declared variance is `σ² + ||c||²`; both can be overridden, for example
/// to build an oracle that deliberately violates its contract.
#[derive(Clone)]
pub struct GaussianNoiseOracle {
    mapping: Arc<dyn Mapping>,
    variance: f64,
    offset: Option<Point>,
    declared: Option<(f64, f64)>,
}

impl GaussianNoiseOracle {
    pub fn new(mapping: Arc<dyn Mapping>, variance: f64) -> Self {
        assert!(variance >= 0.0, "noise variance must be nonnegative");
        GaussianNoiseOracle {
            mapping,
            variance,
            offset: None,
            declared: None,
        }
    }

    pub fn with_offset(mut self, offset: Point) -> Self {
        self.offset = Some(offset);
        self
    }

    pub fn with_declared(mut self, bias: f64, variance: f64) -> Self {
        self.declared = Some((bias, variance));
        self
    }

    fn offset_norm_sq(&self) -> f64 {
        self.offset.as_ref().map_or(0.0, |c| c.norm_squared())
    }
}

impl StochasticOracle for GaussianNoiseOracle {
    fn dim(&self) -> usize {
        self.mapping.dim()
    }

    fn sample(&self, z: &Point, rng: &mut StreamRng) -> Result<Point> {
        let n = self.dim();
        let mut out = self.mapping.evaluate(z);
        if self.variance > 0.0 {
            let scale = (self.variance / n as f64).sqrt();
            out += gaussian_vector(n, rng) * scale;
        }
        if let Some(c) = &self.offset {
            out += c;
        }
        Ok(out)
    }

    fn declared_bias(&self) -> f64 {
        match self.declared {
            Some((b, _)) => b,
            None => (self.variance + self.offset_norm_sq()).sqrt(),
        }
    }

    fn declared_variance(&self) -> f64 {
        match self.declared {
            Some((_, v)) => v,
            None => self.variance + self.offset_norm_sq(),
        }
    }

    fn systematic_bias(&self) -> f64 {
        self.offset_norm_sq().sqrt()
    }

    fn mean_mapping(&self) -> Option<&dyn Mapping> {
        Some(self.mapping.as_ref())
    }
}
