//! Resilient backpropagation without weight backtracking.

use super::{all_finite, HyperParams, Objective, Step, StopReason};

#[derive(Debug, Clone, PartialEq)]
pub struct RpropState {
    pub step_sizes: Vec<f64>,
    /// Gradient from the previous epoch, zeroed where the sign flipped.
    pub prev_grad: Vec<f64>,
}

impl RpropState {
    pub fn new(n: usize, hp: &HyperParams) -> Self {
        Self { step_sizes: vec![hp.rp_delta0; n], prev_grad: vec![0.0; n] }
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Applies one sign-based update to `w` in place.
pub fn rprop_update(state: &mut RpropState, w: &mut [f64], g: &[f64], hp: &HyperParams) {
    for i in 0..w.len() {
        let agreement = sign(g[i]) * sign(state.prev_grad[i]);
        if agreement > 0.0 {
            state.step_sizes[i] = (state.step_sizes[i] * hp.rp_inc).min(hp.rp_delta_max);
            w[i] -= sign(g[i]) * state.step_sizes[i];
            state.prev_grad[i] = g[i];
        } else if agreement < 0.0 {
            state.step_sizes[i] = (state.step_sizes[i] * hp.rp_dec).max(hp.rp_delta_min);
            state.prev_grad[i] = 0.0;
        } else {
            w[i] -= sign(g[i]) * state.step_sizes[i];
            state.prev_grad[i] = g[i];
        }
    }
}

pub fn step_rprop(
    obj: &dyn Objective,
    w: &mut [f64],
    g: &[f64],
    state: &mut RpropState,
    hp: &HyperParams,
) -> Result<Step, StopReason> {
    rprop_update(state, w, g, hp);
    if !all_finite(w) {
        return Err(StopReason::StepFailure);
    }
    let (value, gradient) = obj.value_and_gradient(w);
    if !value.is_finite() || !all_finite(&gradient) {
        return Err(StopReason::StepFailure);
    }
    Ok(Step { accepted: true, value, gradient })
}
