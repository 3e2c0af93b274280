//! JSON files for generated games. Entries are written as shortest
//! round-trip decimals, so a reloaded game is bit-identical.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::game::{MatrixGame, PayoffNoise};

#[derive(Serialize, Deserialize)]
struct GameFile {
    n: usize,
    m: usize,
    lambda_x: f64,
    lambda_y: f64,
    sigma2: f64,
    noise: PayoffNoise,
    /// Row-major.
    a0: Vec<Vec<f64>>,
}

pub fn write_game<W: Write>(game: &MatrixGame, writer: W) -> Result<()> {
    let file = GameFile {
        n: game.n(),
        m: game.m(),
        lambda_x: game.lambda_x,
        lambda_y: game.lambda_y,
        sigma2: game.sigma2,
        noise: game.noise,
        a0: game
            .a0
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect(),
    };
    serde_json::to_writer_pretty(writer, &file)?;
    Ok(())
}

pub fn read_game<R: Read>(reader: R) -> Result<MatrixGame> {
    let file: GameFile = serde_json::from_reader(reader)?;
    if file.a0.len() != file.n || file.a0.iter().any(|r| r.len() != file.m) {
        return Err(Error::Parse(format!(
            "payoff matrix does not have the declared shape {}x{}",
            file.n, file.m
        )));
    }
    let a0 = DMatrix::from_fn(file.n, file.m, |i, j| file.a0[i][j]);
    MatrixGame::new(a0, file.lambda_x, file.lambda_y, file.sigma2, file.noise)
}

pub fn save_game(game: &MatrixGame, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_game(game, &mut buf)?;
    buf.push(b'\n');
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_game(path: &Path) -> Result<MatrixGame> {
    read_game(fs::File::open(path)?)
}
