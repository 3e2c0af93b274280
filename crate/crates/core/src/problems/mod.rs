//! Concrete instances: affine VIs and quadratic saddles with known solutions,
//! and the regularized stochastic matrix game.

pub mod game;
pub mod io;
pub mod quadratic;
pub mod simplex;

pub use game::{
    generate_payoff_matrix, ConditionNumber, GameMappingOracle, GameValueOracle, MatrixGame,
    PayoffNoise, REFERENCE_TOLERANCE,
};
pub use io::{load_game, read_game, save_game, write_game};
pub use quadratic::{QuadraticSaddle, QuadraticVi};
pub use simplex::{project_simplex, SimplexSet};
