//! Scaled conjugate gradient (Møller).
//!
//! No line search: the step length comes from a finite-difference estimate
//! of the curvature along the search direction, regularised by `lambda`,
//! which is adapted with a trust-region style comparison ratio.

use super::{all_finite, dot, HyperParams, Objective, Step, StopReason};

/// `lambda` beyond this means the model has stopped being useful.
const LAMBDA_MAX: f64 = 1e100;

#[derive(Debug, Clone, PartialEq)]
pub struct ScgState {
    /// Search direction.
    pub p: Vec<f64>,
    /// Negative gradient at the current weights.
    pub r: Vec<f64>,
    pub lambda: f64,
    pub lambda_bar: f64,
    /// Curvature estimate `p^T s`, carried over after an unsuccessful epoch.
    pub delta: f64,
    pub success: bool,
    /// Successful steps since the last restart.
    pub since_restart: usize,
    /// Comparison ratio from the most recent epoch.
    pub last_comparison: f64,
    initialised: bool,
}

impl ScgState {
    pub fn new(n: usize, hp: &HyperParams) -> Self {
        Self {
            p: vec![0.0; n],
            r: vec![0.0; n],
            lambda: hp.scg_lambda0,
            lambda_bar: 0.0,
            delta: 0.0,
            success: true,
            since_restart: 0,
            last_comparison: f64::NAN,
            initialised: false,
        }
    }
}

pub fn step_scg(
    obj: &dyn Objective,
    w: &mut [f64],
    value: f64,
    g: &[f64],
    state: &mut ScgState,
    hp: &HyperParams,
) -> Result<Step, StopReason> {
    let n = w.len();
    if !state.initialised {
        state.r = g.iter().map(|v| -v).collect();
        state.p = state.r.clone();
        state.initialised = true;
    }
    if dot(&state.p, &state.r) <= 0.0 {
        // lost descent: restart along the negative gradient with a fresh curvature estimate
        state.p = state.r.clone();
        state.since_restart = 0;
        state.success = true;
        state.lambda_bar = 0.0;
    }
    let p_sq = dot(&state.p, &state.p);
    if p_sq == 0.0 {
        return Err(StopReason::StepFailure);
    }
    let p_norm = p_sq.sqrt();

    if state.success {
        let sigma = hp.scg_sigma / p_norm;
        let probe: Vec<f64> = w.iter().zip(&state.p).map(|(a, b)| a + sigma * b).collect();
        let (_, g_probe) = obj.value_and_gradient(&probe);
        // s = (E'(w + sigma p) - E'(w)) / sigma, and E'(w) = -r
        state.delta = g_probe
            .iter()
            .zip(&state.r)
            .zip(&state.p)
            .map(|((gp, r), p)| (gp + r) / sigma * p)
            .sum();
    }

    let mut delta = state.delta + (state.lambda - state.lambda_bar) * p_sq;
    if delta <= 0.0 {
        state.lambda_bar = 2.0 * (state.lambda - delta / p_sq);
        delta = -delta + state.lambda * p_sq;
        state.lambda = state.lambda_bar;
    }

    let mu = dot(&state.p, &state.r);
    let alpha = mu / delta;
    let trial: Vec<f64> = w.iter().zip(&state.p).map(|(a, b)| a + alpha * b).collect();
    let trial_value = if all_finite(&trial) { obj.value(&trial) } else { f64::NAN };
    let comparison = 2.0 * delta * (value - trial_value) / (mu * mu);
    if !delta.is_finite() || !alpha.is_finite() {
        return Err(StopReason::StepFailure);
    }
    state.last_comparison = comparison;

    let step = if comparison >= 0.0 {
        let (new_value, new_grad) = obj.value_and_gradient(&trial);
        if !new_value.is_finite() || !all_finite(&new_grad) {
            return Err(StopReason::StepFailure);
        }
        w.copy_from_slice(&trial);
        let r_new: Vec<f64> = new_grad.iter().map(|v| -v).collect();
        state.lambda_bar = 0.0;
        state.success = true;
        state.since_restart += 1;
        if state.since_restart >= n {
            state.p = r_new.clone();
            state.since_restart = 0;
        } else {
            let beta = (dot(&r_new, &r_new) - dot(&r_new, &state.r)) / mu;
            state.p = r_new.iter().zip(&state.p).map(|(r, p)| r + beta * p).collect();
        }
        state.r = r_new;
        if comparison >= 0.75 {
            state.lambda *= 0.25;
        }
        Step { accepted: true, value: new_value, gradient: new_grad }
    } else {
        // NaN comparisons land here as well
        state.lambda_bar = state.lambda;
        state.success = false;
        Step { accepted: false, value, gradient: g.to_vec() }
    };

    if !(comparison >= 0.25) {
        let c = if comparison.is_finite() { comparison } else { -1.0 };
        state.lambda += delta * (1.0 - c) / p_sq;
    }
    // after a failure the next epoch re-scales this by the change in lambda
    state.delta = delta;
    if !(state.lambda.is_finite() && state.lambda <= LAMBDA_MAX) {
        return Err(StopReason::StepFailure);
    }
    Ok(step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::problems::Quadratic;

    #[test]
    fn one_successful_epoch_solves_a_1d_quadratic() {
        // f(w) = w^2
        let q = Quadratic::diagonal(&[2.0]);
        let hp = HyperParams::default();
        let mut w = vec![1.0];
        let (v, g) = q.value_and_gradient(&w);
        let mut state = ScgState::new(1, &hp);
        let step = step_scg(&q, &mut w, v, &g, &mut state, &hp).unwrap();
        assert!(step.accepted);
        assert!(w[0].abs() < 1e-3);
    }

    #[test]
    fn failed_comparison_keeps_weights_and_raises_lambda() {
        // nearly flat slope around the start, steep wall beyond |w| = 1
        struct Hump;
        impl Objective for Hump {
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, w: &[f64]) -> f64 {
                let x = w[0];
                if x.abs() < 1.0 {
                    -x
                } else {
                    10.0 * x * x
                }
            }
            fn value_and_gradient(&self, w: &[f64]) -> (f64, Vec<f64>) {
                // linear with tiny fake curvature near the start so the
                // predicted step overshoots into the steep wall
                let x = w[0];
                let g = if x.abs() < 1.0 { -1.0 + 1e-3 * x } else { 20.0 * x };
                (self.value(w), vec![g])
            }
        }
        let hp = HyperParams::default();
        let mut w = vec![0.0];
        let (v, g) = Hump.value_and_gradient(&w);
        let mut state = ScgState::new(1, &hp);
        let lambda_before = state.lambda;
        let step = step_scg(&Hump, &mut w, v, &g, &mut state, &hp).unwrap();
        assert!(state.last_comparison < 0.0);
        assert!(!step.accepted);
        assert_eq!(w, vec![0.0]);
        assert!(state.lambda > lambda_before);
    }
}
