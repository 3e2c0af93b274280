//! Experiment configuration, read from TOML.
//!
//! ```toml
//! seed = 7
//! replications = 10
//! iters = 300
//! method = "szo_extra_point"
//!
//! [problem]
//! kind = "game-normal"
//! n = 10
//! m = 20
//! lambda = 1.0
//! sigma2 = 0.5
//!
//! [params]
//! source = "default"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExtraPoint,
    ExtraMomentum,
    SzoExtraPoint,
    SzoExtraMomentum,
    ExtraGradient,
    Ogda,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::ExtraPoint,
        Method::ExtraMomentum,
        Method::SzoExtraPoint,
        Method::SzoExtraMomentum,
        Method::ExtraGradient,
        Method::Ogda,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::ExtraPoint => "extra_point",
            Method::ExtraMomentum => "extra_momentum",
            Method::SzoExtraPoint => "szo_extra_point",
            Method::SzoExtraMomentum => "szo_extra_momentum",
            Method::ExtraGradient => "extra_gradient",
            Method::Ogda => "ogda",
        }
    }

    /// Whether the update rule is the two-evaluation extra-point form.
    pub fn is_extra_point_family(self) -> bool {
        matches!(
            self,
            Method::ExtraPoint | Method::SzoExtraPoint | Method::ExtraGradient
        )
    }

    pub fn is_baseline(self) -> bool {
        matches!(self, Method::ExtraGradient | Method::Ogda)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Method::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown method `{s}` (expected one of {})",
                    Method::ALL.map(|m| m.name()).join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    /// Quadratic saddle `f = ½‖x-x*‖² + (x-x*)ᵀA(y-y*) - ½‖y-y*‖²` on a ball.
    Synthetic,
    GameNormal,
    GameLognormal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub kind: ProblemKind,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Game: payoff noise variance. Synthetic: total variance of the
    /// first-order oracle, split evenly over the two blocks for value noise.
    #[serde(default)]
    pub sigma2: f64,
    /// Synthetic only.
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Synthetic only: radius of the feasible ball.
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Game only: load this instance instead of generating one.
    #[serde(default)]
    pub path: Option<PathBuf>,
}

fn default_n() -> usize {
    10
}
fn default_m() -> usize {
    20
}
fn default_lambda() -> f64 {
    1.0
}
fn default_kappa() -> f64 {
    5.0
}
fn default_radius() -> f64 {
    2.0
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            kind: ProblemKind::Synthetic,
            n: default_n(),
            m: default_m(),
            lambda: default_lambda(),
            sigma2: 0.0,
            kappa: default_kappa(),
            radius: default_radius(),
            path: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSource {
    #[default]
    Default,
    Explicit,
    Diminishing,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default)]
    pub source: ParamSource,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub tau: Option<f64>,
    pub theta: Option<f64>,
    /// Baselines only; defaults to `1/(4L)`.
    pub step_size: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineOracle {
    #[default]
    FirstOrder,
    ZerothOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchRule {
    /// Geometric batch sizes and radii tied to the horizon.
    #[default]
    Scheduled,
    /// Fixed `batch` with explicit `rho_x`, `rho_y`.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZerothOrderConfig {
    #[serde(default)]
    pub batch_rule: BatchRule,
    pub batch: Option<u64>,
    pub rho_x: Option<f64>,
    pub rho_y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Horizon `K`. Game experiments default to `⌈κ ln(10⁴)⌉`.
    pub iters: Option<usize>,
    #[serde(default = "default_method")]
    pub method: Method,
    pub threads: Option<usize>,
    #[serde(default)]
    pub override_validation: bool,
    #[serde(default)]
    pub baseline_oracle: BaselineOracle,
    /// Write one `d_k` column per replication.
    #[serde(default)]
    pub per_replication: bool,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub problem: ProblemConfig,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub zeroth_order: ZerothOrderConfig,
}

fn default_replications() -> usize {
    1
}
fn default_method() -> Method {
    Method::ExtraPoint
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: None,
            replications: default_replications(),
            iters: None,
            method: default_method(),
            threads: None,
            override_validation: false,
            baseline_oracle: BaselineOracle::default(),
            per_replication: false,
            out: None,
            problem: ProblemConfig::default(),
            params: ParamsConfig::default(),
            zeroth_order: ZerothOrderConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        ExperimentConfig::from_toml_str(&text)
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("a seed is required (`seed` key or --seed)".into()))
    }

    /// Structural checks that need no computation.
    pub fn check(&self) -> Result<()> {
        self.seed()?;
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        let p = &self.problem;
        if p.n == 0 || p.m == 0 {
            return Err(Error::Config("problem dimensions must be positive".into()));
        }
        if !(p.sigma2 >= 0.0 && p.sigma2.is_finite()) {
            return Err(Error::Config("sigma2 must be finite and nonnegative".into()));
        }
        if !(p.lambda > 0.0) {
            return Err(Error::Config("lambda must be positive".into()));
        }
        if p.kind == ProblemKind::Synthetic && !(p.kappa >= 1.0 && p.radius > 0.0) {
            return Err(Error::Config("synthetic problems need kappa >= 1 and radius > 0".into()));
        }
        if self.params.source == ParamSource::Diminishing && !self.method.is_extra_point_family() {
            return Err(Error::Config(
                "the diminishing schedule applies to extra-point methods only".into(),
            ));
        }
        if self.zeroth_order.batch_rule == BatchRule::Constant
            && (self.zeroth_order.rho_x.is_none() || self.zeroth_order.rho_y.is_none())
        {
            return Err(Error::Config("constant batch rule needs rho_x and rho_y".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let c = ExperimentConfig::from_toml_str(
            r#"
            seed = 3
            replications = 4
            iters = 50
            method = "szo_extra_momentum"
            baseline_oracle = "zeroth_order"
            [problem]
            kind = "game-lognormal"
            sigma2 = 0.5
            [params]
            source = "explicit"
            alpha = 0.1
            gamma = 0.01
            tau = 0.09
            theta = 0.125
            [zeroth_order]
            batch_rule = "constant"
            batch = 5
            rho_x = 0.01
            rho_y = 0.01
            "#,
        )
        .unwrap();
        assert_eq!(c.method, Method::SzoExtraMomentum);
        assert_eq!(c.problem.kind, ProblemKind::GameLognormal);
        assert_eq!(c.problem.n, 10);
        assert_eq!(c.params.alpha, Some(0.1));
        c.check().unwrap();
    }

    #[test]
    fn rejects_unknown_keys_and_missing_seed() {
        assert!(matches!(
            ExperimentConfig::from_toml_str("seed = 1\nbogus = 2"),
            Err(Error::Config(_))
        ));
        let c = ExperimentConfig::from_toml_str("iters = 2").unwrap();
        assert!(c.check().is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("extra-gradient".parse::<Method>().unwrap(), Method::ExtraGradient);
        assert!("vs_ave".parse::<Method>().is_err());
    }
}
