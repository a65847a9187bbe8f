//! Gradient descent: plain, with momentum, and the adaptive learning-rate
//! variants (with and without momentum).

use super::{all_finite, HyperParams, Objective, Step, StopReason};

/// Below this the adaptive variants give up.
const MIN_LEARNING_RATE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdMode {
    Gd,
    Gdm,
    Gda,
    Gdx,
}

impl GdMode {
    fn momentum(self) -> bool {
        matches!(self, GdMode::Gdm | GdMode::Gdx)
    }

    fn adaptive(self) -> bool {
        matches!(self, GdMode::Gda | GdMode::Gdx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GdState {
    pub lr: f64,
    pub prev_step: Vec<f64>,
}

impl GdState {
    pub fn new(n: usize, lr: f64) -> Self {
        Self { lr, prev_step: vec![0.0; n] }
    }
}

/// `-lr * g`
pub fn gd_delta(g: &[f64], lr: f64) -> Vec<f64> {
    g.iter().map(|gi| -lr * gi).collect()
}

/// `mc * prev - (1 - mc) * lr * g`
pub fn gdm_delta(prev: &[f64], g: &[f64], lr: f64, mc: f64) -> Vec<f64> {
    prev.iter().zip(g).map(|(p, gi)| mc * p - (1.0 - mc) * lr * gi).collect()
}

/// One epoch of the gradient-descent family. `value`/`g` are at `w`.
pub fn step_gd_family(
    obj: &dyn Objective,
    w: &mut [f64],
    value: f64,
    g: &[f64],
    state: &mut GdState,
    mode: GdMode,
    hp: &HyperParams,
) -> Result<Step, StopReason> {
    let delta = if mode.momentum() {
        gdm_delta(&state.prev_step, g, state.lr, hp.mc)
    } else {
        gd_delta(g, state.lr)
    };
    let trial: Vec<f64> = w.iter().zip(&delta).map(|(a, b)| a + b).collect();
    let finite = all_finite(&trial);

    if !mode.adaptive() {
        if !finite {
            return Err(StopReason::StepFailure);
        }
        let (v, grad) = obj.value_and_gradient(&trial);
        if !v.is_finite() || !all_finite(&grad) {
            return Err(StopReason::StepFailure);
        }
        w.copy_from_slice(&trial);
        state.prev_step = delta;
        return Ok(Step { accepted: true, value: v, gradient: grad });
    }

    let (v, grad) = if finite { obj.value_and_gradient(&trial) } else { (f64::INFINITY, Vec::new()) };
    if !v.is_finite() || !all_finite(&grad) || v > hp.max_perf_inc * value {
        state.lr *= hp.lr_dec;
        if mode == GdMode::Gdx {
            state.prev_step.iter_mut().for_each(|p| *p = 0.0);
        }
        if state.lr < MIN_LEARNING_RATE {
            return Err(StopReason::StepFailure);
        }
        return Ok(Step { accepted: false, value, gradient: g.to_vec() });
    }
    if v < value {
        state.lr *= hp.lr_inc;
    }
    w.copy_from_slice(&trial);
    state.prev_step = delta;
    Ok(Step { accepted: true, value: v, gradient: grad })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::problems::Quadratic;

    #[test]
    fn plain_step_arithmetic() {
        let d = gd_delta(&[2.0], 0.05);
        assert!((1.0 + d[0] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn momentum_step_arithmetic() {
        let d = gdm_delta(&[0.05], &[2.0], 0.05, 0.9);
        assert!((d[0] - 0.035).abs() < 1e-15);
        assert!((1.0 + d[0] - 1.035).abs() < 1e-15);
    }

    #[test]
    fn adaptive_step_rejects_large_increase() {
        // 1/2 a w^2 with a chosen so one lr = 0.05 step takes the value from 1.0 to 1.05
        let a = (1.0 + 1.05f64.sqrt()) / 0.05;
        let q = Quadratic::diagonal(&[a]);
        let w0 = (2.0 / a).sqrt();
        let mut w = vec![w0];
        let (v, g) = q.value_and_gradient(&w);
        assert!((v - 1.0).abs() < 1e-12);
        assert!((q.value(&[w0 - 0.05 * g[0]]) - 1.05).abs() < 1e-12);
        let mut state = GdState::new(1, 0.05);
        let step = step_gd_family(&q, &mut w, v, &g, &mut state, GdMode::Gda, &HyperParams::default()).unwrap();
        assert!(!step.accepted);
        assert_eq!(step.value, v);
        assert_eq!(w, vec![w0]);
        assert!((state.lr - 0.035).abs() < 1e-15);
    }

    #[test]
    fn adaptive_step_grows_rate_on_improvement() {
        let q = Quadratic::diagonal(&[1.0, 2.0]);
        let mut w = vec![1.0, 1.0];
        let (v, g) = q.value_and_gradient(&w);
        let mut state = GdState::new(2, 0.05);
        let step = step_gd_family(&q, &mut w, v, &g, &mut state, GdMode::Gdx, &HyperParams::default()).unwrap();
        assert!(step.accepted && step.value < v);
        assert!((state.lr - 0.05 * 1.05).abs() < 1e-15);
        assert!(state.prev_step.iter().all(|p| *p != 0.0));
    }

    #[test]
    fn gdx_rejection_clears_momentum() {
        let q = Quadratic::diagonal(&[1.0]);
        let mut w = vec![1.0];
        let (v, g) = q.value_and_gradient(&w);
        let mut state = GdState { lr: 100.0, prev_step: vec![0.3] };
        let step = step_gd_family(&q, &mut w, v, &g, &mut state, GdMode::Gdx, &HyperParams::default()).unwrap();
        assert!(!step.accepted);
        assert_eq!(state.prev_step, vec![0.0]);
    }

    #[test]
    fn learning_rate_underflow_is_a_failure() {
        let q = Quadratic::diagonal(&[1.0]);
        let mut w = vec![1.0];
        let (v, g) = q.value_and_gradient(&w);
        let mut state = GdState::new(1, 1e3);
        let hp = HyperParams::default();
        let mut result = Ok(Step { accepted: false, value: v, gradient: g.clone() });
        for _ in 0..200 {
            // always overshoots: pretend the previous value was tiny
            result = step_gd_family(&q, &mut w, 1e-300, &g, &mut state, GdMode::Gda, &hp);
            if result.is_err() {
                break;
            }
        }
        assert_eq!(result, Err(StopReason::StepFailure));
    }
}
