//! Regularized two-player zero-sum matrix game on a product of simplices:
//! `min_x max_y (λx/2)‖x‖² + xᵀA_ξy - (λy/2)‖y‖²`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::singular_values;
use crate::problems::simplex::SimplexSet;
use crate::rng::StreamRng;
use crate::vi::{AffineMapping, FeasibleSet, Mapping, ProductSet, StochasticOracle, ViProblem};
use crate::zeroth_order::NoisyFunctionOracle;
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayoffNoise {
    /// `A_ξ = A0 + σZ`.
    Normal,
    /// `A_ξ = exp(A0/10 + σZ)`, mean `exp(A0/10 + σ²/2)`.
    LogNormal,
}

/// `A0` in 2×2 blocks: per block `a ~ U(-30, 30)`, `b ~ U(0, 30)`, then
/// entries i.i.d. `U(a - b, a + b)`.
pub fn generate_payoff_matrix(n: usize, m: usize, rng: &mut StreamRng) -> Result<DMatrix<f64>> {
    if n == 0 || m == 0 || n % 2 == 1 || m % 2 == 1 {
        return Err(Error::invalid(format!(
            "payoff dimensions must be positive and even, got {n}x{m}"
        )));
    }
    let (hn, hm) = (n / 2, m / 2);
    let mut a0 = DMatrix::zeros(n, m);
    for bi in 0..2 {
        for bj in 0..2 {
            let center: f64 = rng.random_range(-30.0..30.0);
            let width: f64 = rng.random_range(0.0..30.0);
            for i in 0..hn {
                for j in 0..hm {
                    let u: f64 = rng.random();
                    a0[(bi * hn + i, bj * hm + j)] = center - width + 2.0 * width * u;
                }
            }
        }
    }
    Ok(a0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    pub a0: DMatrix<f64>,
    pub lambda_x: f64,
    pub lambda_y: f64,
    pub sigma2: f64,
    pub noise: PayoffNoise,
}

/// Singular-value summary of the Jacobian `[[λx I, Ā], [-Āᵀ, λy I]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionNumber {
    pub mu: f64,
    pub lipschitz: f64,
    pub kappa: f64,
}

impl MatrixGame {
    pub fn new(a0: DMatrix<f64>, lambda_x: f64, lambda_y: f64, sigma2: f64, noise: PayoffNoise) -> Result<Self> {
        if !(lambda_x > 0.0 && lambda_y > 0.0) {
            return Err(Error::invalid("regularization weights must be positive"));
        }
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(Error::invalid("payoff noise variance must be nonnegative"));
        }
        if a0.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("payoff matrix has non-finite entries"));
        }
        Ok(MatrixGame {
            a0,
            lambda_x,
            lambda_y,
            sigma2,
            noise,
        })
    }

    pub fn generate(
        n: usize,
        m: usize,
        lambda: f64,
        sigma2: f64,
        noise: PayoffNoise,
        rng: &mut StreamRng,
    ) -> Result<Self> {
        MatrixGame::new(generate_payoff_matrix(n, m, rng)?, lambda, lambda, sigma2, noise)
    }

    pub fn n(&self) -> usize {
        self.a0.nrows()
    }

    pub fn m(&self) -> usize {
        self.a0.ncols()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// `E[A_ξ]`.
    pub fn mean_payoff(&self) -> DMatrix<f64> {
        match self.noise {
            PayoffNoise::Normal => self.a0.clone(),
            PayoffNoise::LogNormal => self.a0.map(|a| (a / 10.0 + self.sigma2 / 2.0).exp()),
        }
    }

    pub fn sample_payoff(&self, rng: &mut StreamRng) -> DMatrix<f64> {
        let s = self.sigma();
        match self.noise {
            PayoffNoise::Normal => self.a0.map(|a| a + s * rng.sample::<f64, _>(StandardNormal)),
            PayoffNoise::LogNormal => self
                .a0
                .map(|a| (a / 10.0 + s * rng.sample::<f64, _>(StandardNormal)).exp()),
        }
    }

    pub fn jacobian(&self) -> DMatrix<f64> {
        let (n, m) = (self.n(), self.m());
        let a = self.mean_payoff();
        let mut j = DMatrix::zeros(n + m, n + m);
        j.view_mut((0, 0), (n, n)).fill_diagonal(self.lambda_x);
        j.view_mut((n, n), (m, m)).fill_diagonal(self.lambda_y);
        j.view_mut((0, n), (n, m)).copy_from(&a);
        j.view_mut((n, 0), (m, n)).copy_from(&(-a.transpose()));
        j
    }

    /// Largest and smallest singular values of the Jacobian and their ratio.
    pub fn condition_number(&self) -> Result<ConditionNumber> {
        let s = singular_values(&self.jacobian())?;
        let (l, mu) = (s[0], *s.last().expect("nonempty jacobian"));
        Ok(ConditionNumber {
            mu,
            lipschitz: l,
            kappa: l / mu,
        })
    }

    /// The mean mapping `(λx x + Āy; λy y - Āᵀx)`. Its modulus is
    /// `min(λx, λy)` (the skew part contributes nothing) and its Lipschitz
    /// constant the largest singular value of the Jacobian.
    pub fn mapping(&self) -> Result<AffineMapping> {
        let l = self.condition_number()?.lipschitz;
        Ok(AffineMapping::with_constants(
            self.jacobian(),
            Point::zeros(self.n() + self.m()),
            self.lambda_x.min(self.lambda_y),
            l,
        ))
    }

    pub fn feasible_set(&self) -> ProductSet {
        ProductSet::new(vec![
            Arc::new(SimplexSet::new(self.n())),
            Arc::new(SimplexSet::new(self.m())),
        ])
    }

    /// Both players mixing uniformly.
    pub fn uniform_strategies(&self) -> Point {
        let mut z = Point::zeros(self.n() + self.m());
        z.rows_mut(0, self.n()).fill(1.0 / self.n() as f64);
        z.rows_mut(self.n(), self.m()).fill(1.0 / self.m() as f64);
        z
    }

    pub fn mean_value(&self, x: &Point, y: &Point) -> f64 {
        let a = self.mean_payoff();
        0.5 * self.lambda_x * x.norm_squared() + x.dot(&(a * y)) - 0.5 * self.lambda_y * y.norm_squared()
    }

    /// `f̂(x, y, ξ)` from one payoff draw.
    pub fn sample_value(&self, x: &Point, y: &Point, rng: &mut StreamRng) -> f64 {
        let a = self.sample_payoff(rng);
        0.5 * self.lambda_x * x.norm_squared() + x.dot(&(a * y)) - 0.5 * self.lambda_y * y.norm_squared()
    }

    /// `F̂(z)` from one payoff draw.
    pub fn sample_mapping(&self, z: &Point, rng: &mut StreamRng) -> Result<Point> {
        let (n, m) = (self.n(), self.m());
        if z.len() != n + m {
            return Err(Error::DimensionMismatch {
                expected: n + m,
                found: z.len(),
            });
        }
        let x = z.rows(0, n);
        let y = z.rows(n, m);
        let a = self.sample_payoff(rng);
        let mut out = Point::zeros(n + m);
        out.rows_mut(0, n).copy_from(&(x * self.lambda_x + &a * y));
        out.rows_mut(n, m).copy_from(&(y * self.lambda_y - a.transpose() * x));
        Ok(out)
    }

    /// Entrywise payoff variance.
    pub fn payoff_variance(&self) -> DMatrix<f64> {
        match self.noise {
            PayoffNoise::Normal => DMatrix::from_element(self.n(), self.m(), self.sigma2),
            PayoffNoise::LogNormal => self
                .a0
                .map(|a| (self.sigma2.exp() - 1.0) * (a / 5.0 + self.sigma2).exp()),
        }
    }

    /// Bounds on `E‖(A_ξ - Ā)y‖²` and `E‖(A_ξ - Ā)ᵀx‖²` over the simplices:
    /// `Σ_i max_j Var_ij` and `Σ_j max_i Var_ij`. For normal noise these are
    /// `nσ²` and `mσ²`.
    pub fn induced_gradient_noise(&self) -> (f64, f64) {
        let v = self.payoff_variance();
        let rows = v.row_iter().map(|r| r.max()).sum();
        let cols = v.column_iter().map(|c| c.max()).sum();
        (rows, cols)
    }

    /// `M`: largest partial-gradient norm of the mean value over the
    /// simplices, attained at a pair of vertices.
    pub fn value_lipschitz(&self) -> f64 {
        let a = self.mean_payoff();
        let mut best = 0.0_f64;
        for i in 0..self.n() {
            for j in 0..self.m() {
                let mut gx = a.column(j).into_owned();
                gx[i] += self.lambda_x;
                let mut gy = a.row(i).transpose();
                gy[j] -= self.lambda_y;
                best = best.max(gx.norm()).max(gy.norm());
            }
        }
        best
    }

    /// Unique solution of the mean-payoff game by deterministic extra-gradient
    /// with step `1/(2L)`, stopped once `‖z - P(z - F(z))‖ <= tolerance`.
    pub fn solve_reference(&self, tolerance: f64, start: Option<&Point>) -> Result<Point> {
        solve_projected(&self.mapping()?, &self.feasible_set(), tolerance, start.cloned().unwrap_or_else(|| self.uniform_strategies()))
    }

    /// The VI with the first-order payoff-sampling oracle and a reference
    /// solution solved to `tolerance`.
    pub fn problem(&self, tolerance: f64) -> Result<ViProblem> {
        let mapping = self.mapping()?;
        let oracle = Arc::new(GameMappingOracle::new(self.clone())?);
        ViProblem::new(
            Arc::new(self.feasible_set()),
            oracle,
            mapping.modulus(),
            mapping.lipschitz(),
        )?
        .with_reference_solution(self.solve_reference(tolerance, None)?)
    }
}

pub const REFERENCE_TOLERANCE: f64 = 1e-10;
const REFERENCE_MAX_ITERS: usize = 2_000_000;

pub(crate) fn solve_projected(
    mapping: &dyn Mapping,
    set: &dyn FeasibleSet,
    tolerance: f64,
    start: Point,
) -> Result<Point> {
    if !(tolerance > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let step = 0.5 / mapping.lipschitz();
    let residual = |z: &Point| (z - set.project(&(z - mapping.evaluate(z)))).norm();
    let mut z = set.project(&start);
    let mut last = residual(&z);
    for it in 0..REFERENCE_MAX_ITERS {
        if it % 10 == 0 {
            last = residual(&z);
            if last <= tolerance {
                return Ok(z);
            }
        }
        let half = set.project(&(&z - mapping.evaluate(&z) * step));
        z = set.project(&(&z - mapping.evaluate(&half) * step));
    }
    Err(Error::NotConverged {
        what: "reference solve",
        iterations: REFERENCE_MAX_ITERS,
        residual: last,
    })
}

/// First-order oracle: one payoff draw per call.
#[derive(Debug, Clone)]
pub struct GameMappingOracle {
    game: MatrixGame,
    mapping: AffineMapping,
    variance: f64,
}

impl GameMappingOracle {
    pub fn new(game: MatrixGame) -> Result<Self> {
        let mapping = game.mapping()?;
        let (vx, vy) = game.induced_gradient_noise();
        Ok(GameMappingOracle {
            game,
            mapping,
            variance: vx + vy,
        })
    }
}

impl StochasticOracle for GameMappingOracle {
    fn dim(&self) -> usize {
        self.game.n() + self.game.m()
    }

    fn sample(&self, z: &Point, rng: &mut StreamRng) -> Result<Point> {
        self.game.sample_mapping(z, rng)
    }

    fn declared_bias(&self) -> f64 {
        self.variance.sqrt()
    }

    fn declared_variance(&self) -> f64 {
        self.variance
    }

    fn systematic_bias(&self) -> f64 {
        0.0
    }

    fn mean_mapping(&self) -> Option<&dyn Mapping> {
        Some(&self.mapping)
    }
}

/// Zeroth-order access to the game value. Under normal noise the values at
/// several queries with a shared payoff draw are jointly Gaussian with
/// covariance `σ²(x_a·x_b)(y_a·y_b)`; they are sampled from that law directly
/// instead of materialising the whole matrix. Log-normal noise draws the
/// matrix.
#[derive(Debug, Clone)]
pub struct GameValueOracle {
    game: MatrixGame,
    mean_payoff: DMatrix<f64>,
    operator: AffineMapping,
    value_lipschitz: f64,
    gradient_noise: f64,
    smoothness: f64,
}

impl GameValueOracle {
    pub fn new(game: MatrixGame) -> Result<Self> {
        let operator = game.mapping()?;
        let (vx, vy) = game.induced_gradient_noise();
        Ok(GameValueOracle {
            mean_payoff: game.mean_payoff(),
            value_lipschitz: game.value_lipschitz(),
            gradient_noise: vx.max(vy),
            smoothness: operator.lipschitz(),
            operator,
            game,
        })
    }

    pub fn game(&self) -> &MatrixGame {
        &self.game
    }

    fn mean(&self, x: &Point, y: &Point) -> f64 {
        0.5 * self.game.lambda_x * x.norm_squared() + x.dot(&(&self.mean_payoff * y))
            - 0.5 * self.game.lambda_y * y.norm_squared()
    }
}

/// Draws `N(0, G)` for a small positive semidefinite `G` via a Cholesky
/// factor, treating numerically zero pivots as exact zeros.
fn correlated_normals(gram: &DMatrix<f64>, rng: &mut StreamRng) -> Vec<f64> {
    let q = gram.nrows();
    let scale = gram.diagonal().max().max(f64::MIN_POSITIVE);
    let mut l = DMatrix::<f64>::zeros(q, q);
    for j in 0..q {
        let mut d = gram[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 1e-14 * scale {
            continue;
        }
        let root = d.sqrt();
        l[(j, j)] = root;
        for i in (j + 1)..q {
            let mut s = gram[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / root;
        }
    }
    let z: Vec<f64> = (0..q).map(|_| rng.sample(StandardNormal)).collect();
    (0..q)
        .map(|i| (0..=i).map(|k| l[(i, k)] * z[k]).sum())
        .collect()
}

impl NoisyFunctionOracle for GameValueOracle {
    fn dims(&self) -> (usize, usize) {
        (self.game.n(), self.game.m())
    }

    fn evaluate_shared(&self, queries: &[(&Point, &Point)], rng: &mut StreamRng) -> Result<Vec<f64>> {
        let (n, m) = self.dims();
        for (x, y) in queries {
            if x.len() != n || y.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: n + m,
                    found: x.len() + y.len(),
                });
            }
        }
        let g = &self.game;
        match g.noise {
            PayoffNoise::Normal => {
                let mut values: Vec<f64> = queries.iter().map(|(x, y)| self.mean(x, y)).collect();
                if g.sigma2 > 0.0 {
                    let q = queries.len();
                    let gram = DMatrix::from_fn(q, q, |a, b| {
                        g.sigma2 * queries[a].0.dot(queries[b].0) * queries[a].1.dot(queries[b].1)
                    });
                    for (v, e) in values.iter_mut().zip(correlated_normals(&gram, rng)) {
                        *v += e;
                    }
                }
                Ok(values)
            }
            PayoffNoise::LogNormal => {
                let a = g.sample_payoff(rng);
                Ok(queries
                    .iter()
                    .map(|(x, y)| {
                        0.5 * g.lambda_x * x.norm_squared() + x.dot(&(&a * *y))
                            - 0.5 * g.lambda_y * y.norm_squared()
                    })
                    .collect())
            }
        }
    }

    fn value_lipschitz(&self) -> f64 {
        self.value_lipschitz
    }

    fn gradient_noise(&self) -> f64 {
        self.gradient_noise
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
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
    use nalgebra::DVector;

    #[test]
    fn generated_entries_are_bounded_and_reproducible() {
        let a = generate_payoff_matrix(10, 20, &mut rng::stream(5, rng::PROBLEM_STREAM)).unwrap();
        let b = generate_payoff_matrix(10, 20, &mut rng::stream(5, rng::PROBLEM_STREAM)).unwrap();
        assert_eq!(a.shape(), (10, 20));
        assert!(a.iter().all(|v| (-60.0..=60.0).contains(v)));
        assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert!(generate_payoff_matrix(3, 4, &mut rng::stream(0, 0)).is_err());
    }

    #[test]
    fn one_by_one_game() {
        let g = MatrixGame::new(DMatrix::from_element(1, 1, 1.0), 1.0, 1.0, 0.0, PayoffNoise::Normal).unwrap();
        let c = g.condition_number().unwrap();
        assert!((c.mu - 2f64.sqrt()).abs() < 1e-14 && (c.lipschitz - 2f64.sqrt()).abs() < 1e-14);
        assert!((c.kappa - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_payoff_solution_is_uniform() {
        let g = MatrixGame::new(DMatrix::zeros(4, 6), 1.0, 1.0, 0.5, PayoffNoise::Normal).unwrap();
        let c = g.condition_number().unwrap();
        assert_eq!((c.mu, c.lipschitz, c.kappa), (1.0, 1.0, 1.0));
        let z = g.solve_reference(1e-12, None).unwrap();
        assert!((z - g.uniform_strategies()).norm() < 1e-12);
    }

    #[test]
    fn reference_solution_is_start_independent() {
        let mut r = rng::stream(9, rng::PROBLEM_STREAM);
        let g = MatrixGame::generate(4, 6, 1.0, 0.5, PayoffNoise::Normal, &mut r).unwrap();
        let tol = 1e-10;
        let a = g.solve_reference(tol, None).unwrap();
        let mut start = DVector::zeros(10);
        start[0] = 1.0;
        start[9] = 1.0;
        let b = g.solve_reference(tol, Some(&start)).unwrap();
        assert!((&a - &b).norm() <= 10.0 * tol / g.lambda_x);
        let set = g.feasible_set();
        let map = g.mapping().unwrap();
        assert!((&a - set.project(&(&a - map.evaluate(&a)))).norm() <= tol);
    }

    #[test]
    fn vertex_value_without_noise() {
        let mut r = rng::stream(1, 0);
        let g = MatrixGame::generate(2, 2, 1.5, 0.0, PayoffNoise::Normal, &mut r).unwrap();
        let e = DVector::from_vec(vec![1.0, 0.0]);
        let v = g.sample_value(&e, &e, &mut r);
        assert_eq!(v, 0.75 + g.a0[(0, 0)] - 0.75);
        assert_eq!(g.sample_payoff(&mut r), g.a0);
    }

    #[test]
    fn shared_draw_sampler_matches_matrix_draws() {
        // Compare E and covariance of the three values in a zeroth-order probe.
        let mut r = rng::stream(2, 0);
        let g = MatrixGame::generate(2, 4, 1.0, 0.5, PayoffNoise::Normal, &mut r).unwrap();
        let fast = GameValueOracle::new(g.clone()).unwrap();
        let x = DVector::from_vec(vec![0.3, 0.7]);
        let y = DVector::from_vec(vec![0.1, 0.2, 0.3, 0.4]);
        let xp = DVector::from_vec(vec![0.6, 0.4]);
        let yp = DVector::from_vec(vec![0.4, 0.3, 0.2, 0.1]);
        let queries = [(&x, &y), (&xp, &y), (&x, &yp)];
        let n = 40_000;
        let mut sum_fast = [[0.0; 3]; 3];
        let mut sum_slow = [[0.0; 3]; 3];
        for _ in 0..n {
            let f = fast.evaluate_shared(&queries, &mut r).unwrap();
            let a = g.sample_payoff(&mut r);
            let s: Vec<f64> = queries.iter().map(|(p, q)| p.dot(&(&a * *q)) - p.dot(&(&g.a0 * *q))).collect();
            for i in 0..3 {
                let fi = f[i] - fast.mean(queries[i].0, queries[i].1);
                for j in 0..3 {
                    let fj = f[j] - fast.mean(queries[j].0, queries[j].1);
                    sum_fast[i][j] += fi * fj;
                    sum_slow[i][j] += s[i] * s[j];
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let exact = g.sigma2 * queries[i].0.dot(queries[j].0) * queries[i].1.dot(queries[j].1);
                let (cf, cs) = (sum_fast[i][j] / n as f64, sum_slow[i][j] / n as f64);
                assert!((cf - exact).abs() < 0.05 * exact, "fast {cf} vs {exact}");
                assert!((cs - exact).abs() < 0.05 * exact, "slow {cs} vs {exact}");
            }
        }
    }

    #[test]
    fn induced_noise_for_normal_payoffs() {
        let g = MatrixGame::new(DMatrix::zeros(4, 6), 1.0, 1.0, 0.5, PayoffNoise::Normal).unwrap();
        assert_eq!(g.induced_gradient_noise(), (2.0, 3.0));
    }
}
