//! Problem abstraction: feasible sets, mappings, stochastic oracles and the
//! empirical checks of their contracts.

pub mod contract;
pub mod oracle;
pub mod sets;

use std::sync::Arc;

use crate::error::{Error, Result};
pub use contract::{
    verify_lipschitz, verify_monotonicity, verify_oracle_contract, verify_projection,
    verify_solution, LipschitzReport, MonotonicityReport, OracleContractReport, ProbeEstimate,
    ProjectionReport,
};
pub use oracle::{
    AffineMapping, ExactOracle, FnMapping, GaussianNoiseOracle, Mapping, StochasticOracle,
};
pub use sets::{Ball, EuclideanSpace, FeasibleSet, ProductSet};

use crate::Point;

/// A strongly monotone VI: find `z*` in the set with `F(z*)ᵀ(z - z*) >= 0`.
#[derive(Clone)]
pub struct ViProblem {
    pub set: Arc<dyn FeasibleSet>,
    pub oracle: Arc<dyn StochasticOracle>,
    pub modulus: f64,
    pub lipschitz: f64,
    pub reference_solution: Option<Point>,
}

impl ViProblem {
    pub fn new(
        set: Arc<dyn FeasibleSet>,
        oracle: Arc<dyn StochasticOracle>,
        modulus: f64,
        lipschitz: f64,
    ) -> Result<Self> {
        if set.dim() != oracle.dim() {
            return Err(Error::DimensionMismatch {
                expected: set.dim(),
                found: oracle.dim(),
            });
        }
        if !(modulus > 0.0 && modulus.is_finite()) {
            return Err(Error::invalid(format!("modulus must be positive, got {modulus}")));
        }
        if !(lipschitz >= modulus && lipschitz.is_finite()) {
            return Err(Error::invalid(format!(
                "lipschitz constant {lipschitz} must be finite and at least the modulus {modulus}"
            )));
        }
        Ok(ViProblem {
            set,
            oracle,
            modulus,
            lipschitz,
            reference_solution: None,
        })
    }

    /// Builds the problem with constants taken from the oracle's mean mapping.
    pub fn from_mapping_constants(
        set: Arc<dyn FeasibleSet>,
        oracle: Arc<dyn StochasticOracle>,
    ) -> Result<Self> {
        let (mu, l) = {
            let m = oracle.mean_mapping().ok_or(Error::MissingMapping)?;
            (m.modulus(), m.lipschitz())
        };
        ViProblem::new(set, oracle, mu, l)
    }

    pub fn with_reference_solution(mut self, z_star: Point) -> Result<Self> {
        if z_star.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z_star.len(),
            });
        }
        self.reference_solution = Some(z_star);
        Ok(self)
    }

    /// Replaces the oracle, keeping set, constants and reference solution.
    pub fn with_oracle(mut self, oracle: Arc<dyn StochasticOracle>) -> Result<Self> {
        if oracle.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: oracle.dim(),
            });
        }
        self.oracle = oracle;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn kappa(&self) -> f64 {
        self.lipschitz / self.modulus
    }

    pub fn diameter(&self) -> f64 {
        self.set.diameter()
    }
}
