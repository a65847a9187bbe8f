//! The twelve batch training algorithms.
//!
//! Every algorithm works on an [`Objective`] over a flat parameter vector,
//! so the same code trains the network and the closed-form test problems.
//! The per-algorithm update rules are exposed as small pure functions
//! (`gd_delta`, `rprop_update`, `cg_direction`, ...) next to the epoch
//! drivers that call them.

mod cg;
mod gd;
mod lm;
mod objective;
mod quasi_newton;
mod rprop;
mod scg;
mod train;

pub mod line_search;
pub mod problems;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use cg::{cg_direction, step_cg, CgState, CgVariant};
pub use gd::{gd_delta, gdm_delta, step_gd_family, GdMode, GdState};
pub use lm::{lm_solve, step_lm, LmState, LmTrial};
pub use objective::{NetworkObjective, Objective};
pub use quasi_newton::{bfgs_update, oss_direction, step_bfgs, step_oss, BfgsState, OssState};
pub use rprop::{rprop_update, step_rprop, RpropState};
pub use scg::{step_scg, ScgState};
pub use train::{train, train_run, EpochLog, OptimizerState, StopReason, TrainConfig, TrainRecord};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid value for `{field}`: {constraint}")]
    Invalid { field: &'static str, constraint: &'static str },
    #[error("unknown training algorithm `{0}`")]
    UnknownAlgorithm(String),
}

fn require(ok: bool, field: &'static str, constraint: &'static str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Invalid { field, constraint })
    }
}

/// The twelve training algorithms, named as in the toolbox they come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmId {
    Traingd,
    Traingdm,
    Traingda,
    Traingdx,
    Trainrp,
    Traincgf,
    Traincgp,
    Traincgb,
    Trainscg,
    Trainbfg,
    Trainoss,
    Trainlm,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 12] = [
        AlgorithmId::Traingd,
        AlgorithmId::Traingdm,
        AlgorithmId::Traingda,
        AlgorithmId::Traingdx,
        AlgorithmId::Trainrp,
        AlgorithmId::Traincgf,
        AlgorithmId::Traincgp,
        AlgorithmId::Traincgb,
        AlgorithmId::Trainscg,
        AlgorithmId::Trainbfg,
        AlgorithmId::Trainoss,
        AlgorithmId::Trainlm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::Traingd => "traingd",
            AlgorithmId::Traingdm => "traingdm",
            AlgorithmId::Traingda => "traingda",
            AlgorithmId::Traingdx => "traingdx",
            AlgorithmId::Trainrp => "trainrp",
            AlgorithmId::Traincgf => "traincgf",
            AlgorithmId::Traincgp => "traincgp",
            AlgorithmId::Traincgb => "traincgb",
            AlgorithmId::Trainscg => "trainscg",
            AlgorithmId::Trainbfg => "trainbfg",
            AlgorithmId::Trainoss => "trainoss",
            AlgorithmId::Trainlm => "trainlm",
        }
    }

    /// Whether `learning_rate` influences this algorithm.
    pub fn uses_learning_rate(self) -> bool {
        matches!(
            self,
            AlgorithmId::Traingd | AlgorithmId::Traingdm | AlgorithmId::Traingda | AlgorithmId::Traingdx
        )
    }

    /// Parses a comma-separated list such as `traingd,trainlm`.
    pub fn parse_list(s: &str) -> Result<Vec<AlgorithmId>, ConfigError> {
        s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        AlgorithmId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| ConfigError::UnknownAlgorithm(s.to_string()))
    }
}

/// Algorithm-specific constants. Defaults follow the conventional toolbox values.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    /// Momentum constant for traingdm / traingdx.
    pub mc: f64,
    pub lr_inc: f64,
    pub lr_dec: f64,
    /// Largest tolerated MSE growth ratio before an adaptive step is rejected.
    pub max_perf_inc: f64,
    pub rp_delta0: f64,
    pub rp_inc: f64,
    pub rp_dec: f64,
    pub rp_delta_min: f64,
    pub rp_delta_max: f64,
    pub mu0: f64,
    pub mu_inc: f64,
    pub mu_dec: f64,
    pub mu_max: f64,
    pub scg_sigma: f64,
    pub scg_lambda0: f64,
    pub ls_c1: f64,
    /// Curvature constant for the conjugate-gradient searches.
    pub cg_c2: f64,
    /// Curvature constant for BFGS and one-step secant searches.
    pub qn_c2: f64,
    pub ls_max_iter: usize,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            mc: 0.9,
            lr_inc: 1.05,
            lr_dec: 0.7,
            max_perf_inc: 1.04,
            rp_delta0: 0.07,
            rp_inc: 1.2,
            rp_dec: 0.5,
            rp_delta_min: 1e-6,
            rp_delta_max: 50.0,
            mu0: 1e-3,
            mu_inc: 10.0,
            mu_dec: 0.1,
            mu_max: 1e10,
            scg_sigma: 5e-5,
            scg_lambda0: 5e-7,
            ls_c1: 1e-4,
            cg_c2: 0.1,
            qn_c2: 0.9,
            ls_max_iter: 50,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        require((0.0..=1.0).contains(&self.mc), "mc", "0 <= mc <= 1")?;
        require(0.0 < self.lr_dec && self.lr_dec < 1.0 && 1.0 < self.lr_inc, "lr_inc/lr_dec", "0 < lr_dec < 1 < lr_inc")?;
        require(self.max_perf_inc >= 1.0, "max_perf_inc", "max_perf_inc >= 1")?;
        require(0.0 < self.rp_dec && self.rp_dec < 1.0 && 1.0 < self.rp_inc, "rp_inc/rp_dec", "0 < rp_dec < 1 < rp_inc")?;
        require(
            0.0 < self.rp_delta_min && self.rp_delta_min <= self.rp_delta0 && self.rp_delta0 <= self.rp_delta_max,
            "rp_delta0",
            "0 < rp_delta_min <= rp_delta0 <= rp_delta_max",
        )?;
        require(self.mu0 > 0.0 && self.mu0 <= self.mu_max, "mu0", "0 < mu0 <= mu_max")?;
        require(0.0 < self.mu_dec && self.mu_dec < 1.0 && 1.0 < self.mu_inc, "mu_inc/mu_dec", "mu_dec < 1 < mu_inc")?;
        require(self.scg_sigma > 0.0, "scg_sigma", "scg_sigma > 0")?;
        require(self.scg_lambda0 > 0.0, "scg_lambda0", "scg_lambda0 > 0")?;
        require(0.0 < self.ls_c1 && self.ls_c1 < self.cg_c2 && self.cg_c2 < 1.0, "cg_c2", "0 < c1 < c2 < 1")?;
        require(0.0 < self.ls_c1 && self.ls_c1 < self.qn_c2 && self.qn_c2 < 1.0, "qn_c2", "0 < c1 < c2 < 1")?;
        require(self.ls_max_iter >= 1, "ls_max_iter", "ls_max_iter >= 1")?;
        Ok(())
    }
}

/// Result of one epoch's update: whether the step was taken, and the
/// objective value and gradient at the (possibly unchanged) weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub accepted: bool,
    pub value: f64,
    pub gradient: Vec<f64>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}
