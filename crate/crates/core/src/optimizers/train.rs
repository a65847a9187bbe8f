use std::fmt;
use std::str::FromStr;

use super::{
    norm, require, step_bfgs, step_cg, step_gd_family, step_lm, step_oss, step_rprop, step_scg, AlgorithmId,
    BfgsState, CgState, CgVariant, ConfigError, GdMode, GdState, HyperParams, LmState, NetworkObjective, Objective,
    OssState, RpropState, ScgState, Step,
};
use crate::network::{NetworkError, Sample, Topology, Weights};

/// Stopping rules shared by all algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub max_epochs: usize,
    /// MSE at or below which training stops successfully.
    pub goal: f64,
    /// Only the gradient-descent family uses this.
    pub learning_rate: f64,
    pub min_gradient: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { max_epochs: 1000, goal: 1e-3, learning_rate: 0.05, min_gradient: 1e-10 }
    }
}

impl TrainConfig {
    /// Checks invariants and returns warnings for settings that are legal
    /// but have no effect.
    pub fn validate(&self, algorithms: &[AlgorithmId]) -> Result<Vec<String>, ConfigError> {
        require(self.max_epochs >= 1, "max_epochs", "max_epochs >= 1")?;
        require(self.goal > 0.0 && self.goal.is_finite(), "goal", "goal > 0")?;
        require(self.learning_rate > 0.0 && self.learning_rate.is_finite(), "learning_rate", "learning_rate > 0")?;
        require(self.min_gradient >= 0.0, "min_gradient", "min_gradient >= 0")?;
        let ignored: Vec<&str> =
            algorithms.iter().filter(|a| !a.uses_learning_rate()).map(|a| a.name()).collect();
        let mut warnings = Vec::new();
        if !ignored.is_empty() && self.learning_rate != TrainConfig::default().learning_rate {
            warnings.push(format!("learning_rate has no effect on {}", ignored.join(", ")));
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    GoalReached,
    MaxEpochs,
    MinGradient,
    MuOverflow,
    StepFailure,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::GoalReached => "goal_reached",
            StopReason::MaxEpochs => "max_epochs",
            StopReason::MinGradient => "min_gradient",
            StopReason::MuOverflow => "mu_overflow",
            StopReason::StepFailure => "step_failure",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StopReason {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            StopReason::GoalReached,
            StopReason::MaxEpochs,
            StopReason::MinGradient,
            StopReason::MuOverflow,
            StopReason::StepFailure,
        ]
        .into_iter()
        .find(|r| r.name() == s.trim())
        .ok_or_else(|| format!("unknown stop reason `{s}`"))
    }
}

/// Per-epoch log entry. `rate` is the learning rate (gd family), damping
/// `mu` (trainlm) or `lambda` (trainscg) after the epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub mse: f64,
    pub rate: Option<f64>,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainRecord {
    pub algorithm: AlgorithmId,
    pub stop_reason: StopReason,
    pub epochs_used: usize,
    /// MSE before training followed by the MSE after every epoch.
    pub mse_history: Vec<f64>,
    pub final_weights: Vec<f64>,
    pub log: Vec<EpochLog>,
}

impl TrainRecord {
    pub fn final_mse(&self) -> f64 {
        *self.mse_history.last().unwrap()
    }

    /// `epoch,mse,rate,accepted` with one row per epoch (epoch 0 is the initial state).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,mse,rate,accepted\n");
        out.push_str(&format!("0,{:e},,true\n", self.mse_history[0]));
        for e in &self.log {
            let rate = e.rate.map(|r| format!("{r:e}")).unwrap_or_default();
            out.push_str(&format!("{},{:e},{},{}\n", e.epoch, e.mse, rate, e.accepted));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerState {
    Gd(GdState, GdMode),
    Rprop(RpropState),
    Cg(CgState, CgVariant),
    Scg(ScgState),
    Bfgs(BfgsState),
    Oss(OssState),
    Lm(LmState),
}

impl OptimizerState {
    pub fn new(algo: AlgorithmId, n: usize, cfg: &TrainConfig, hp: &HyperParams) -> Self {
        let gd = |mode| OptimizerState::Gd(GdState::new(n, cfg.learning_rate), mode);
        let cg = |variant| OptimizerState::Cg(CgState::new(n), variant);
        match algo {
            AlgorithmId::Traingd => gd(GdMode::Gd),
            AlgorithmId::Traingdm => gd(GdMode::Gdm),
            AlgorithmId::Traingda => gd(GdMode::Gda),
            AlgorithmId::Traingdx => gd(GdMode::Gdx),
            AlgorithmId::Trainrp => OptimizerState::Rprop(RpropState::new(n, hp)),
            AlgorithmId::Traincgf => cg(CgVariant::FletcherReeves),
            AlgorithmId::Traincgp => cg(CgVariant::PolakRibiere),
            AlgorithmId::Traincgb => cg(CgVariant::PowellBeale),
            AlgorithmId::Trainscg => OptimizerState::Scg(ScgState::new(n, hp)),
            AlgorithmId::Trainbfg => OptimizerState::Bfgs(BfgsState::new(n)),
            AlgorithmId::Trainoss => OptimizerState::Oss(OssState::new()),
            AlgorithmId::Trainlm => OptimizerState::Lm(LmState::new(hp)),
        }
    }

    fn rate(&self) -> Option<f64> {
        match self {
            OptimizerState::Gd(s, _) => Some(s.lr),
            OptimizerState::Scg(s) => Some(s.lambda),
            OptimizerState::Lm(s) => Some(s.mu),
            _ => None,
        }
    }

    fn step(
        &mut self,
        obj: &dyn Objective,
        w: &mut [f64],
        value: f64,
        g: &[f64],
        hp: &HyperParams,
    ) -> Result<Step, StopReason> {
        match self {
            OptimizerState::Gd(s, mode) => step_gd_family(obj, w, value, g, s, *mode, hp),
            OptimizerState::Rprop(s) => step_rprop(obj, w, g, s, hp),
            OptimizerState::Cg(s, variant) => step_cg(obj, w, value, g, s, *variant, hp),
            OptimizerState::Scg(s) => step_scg(obj, w, value, g, s, hp),
            OptimizerState::Bfgs(s) => step_bfgs(obj, w, value, g, s, hp),
            OptimizerState::Oss(s) => step_oss(obj, w, value, g, s, hp),
            OptimizerState::Lm(s) => step_lm(obj, w, value, s, hp).map(|(step, _)| step),
        }
    }
}

/// Trains from `initial` until a stopping rule fires.
pub fn train(
    obj: &dyn Objective,
    initial: &[f64],
    algorithm: AlgorithmId,
    cfg: &TrainConfig,
    hp: &HyperParams,
) -> TrainRecord {
    let mut w = initial.to_vec();
    let mut state = OptimizerState::new(algorithm, w.len(), cfg, hp);
    let (mut value, mut g) = obj.value_and_gradient(&w);
    let mut mse_history = vec![value];
    let mut log = Vec::new();
    let mut epochs = 0;

    let stop_reason = loop {
        if !value.is_finite() {
            break StopReason::StepFailure;
        }
        if value <= cfg.goal {
            break StopReason::GoalReached;
        }
        if norm(&g) < cfg.min_gradient {
            break StopReason::MinGradient;
        }
        if epochs >= cfg.max_epochs {
            break StopReason::MaxEpochs;
        }
        let mut trial_w = w.clone();
        match state.step(obj, &mut trial_w, value, &g, hp) {
            Ok(step) => {
                epochs += 1;
                w = trial_w;
                value = step.value;
                g = step.gradient;
                mse_history.push(value);
                log.push(EpochLog { epoch: epochs, mse: value, rate: state.rate(), accepted: step.accepted });
            }
            Err(reason) => break reason,
        }
    };

    TrainRecord { algorithm, stop_reason, epochs_used: epochs, mse_history, final_weights: w, log }
}

/// Trains a network on normalized samples starting from `initial`.
pub fn train_run(
    initial: &Weights,
    topology: &Topology,
    data: &[Sample],
    algorithm: AlgorithmId,
    cfg: &TrainConfig,
    hp: &HyperParams,
) -> Result<TrainRecord, NetworkError> {
    if initial.len() != topology.param_count() {
        return Err(NetworkError::DimensionMismatch { expected: topology.param_count(), found: initial.len() });
    }
    let obj = NetworkObjective::new(topology, data)?;
    Ok(train(&obj, initial.as_slice(), algorithm, cfg, hp))
}
