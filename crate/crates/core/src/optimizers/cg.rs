//! Nonlinear conjugate gradient: Fletcher-Reeves, Polak-Ribiere and
//! Powell-Beale restarts.

use super::line_search::{search_direction, WolfeParams};
use super::{dot, norm, HyperParams, Objective, Step, StopReason};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgVariant {
    FletcherReeves,
    PolakRibiere,
    PowellBeale,
}

/// Orthogonality threshold of the Powell-Beale restart test.
const POWELL_BEALE_RATIO: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct CgState {
    pub prev_grad: Option<Vec<f64>>,
    pub prev_dir: Vec<f64>,
    pub prev_alpha: f64,
    /// Epochs since the direction was last reset to steepest descent.
    pub since_restart: usize,
}

impl CgState {
    pub fn new(n: usize) -> Self {
        Self { prev_grad: None, prev_dir: vec![0.0; n], prev_alpha: 0.0, since_restart: 0 }
    }
}

fn steepest(g: &[f64]) -> Vec<f64> {
    g.iter().map(|v| -v).collect()
}

/// Search direction from the current gradient and the previous
/// `(gradient, direction)` pair. Returns the direction and whether it is a
/// restart (`-g`).
pub fn cg_direction(variant: CgVariant, g: &[f64], prev: Option<(&[f64], &[f64])>) -> (Vec<f64>, bool) {
    let Some((g_prev, d_prev)) = prev else {
        return (steepest(g), true);
    };
    let gg = dot(g, g);
    let gp_gp = dot(g_prev, g_prev);
    if gp_gp == 0.0 {
        return (steepest(g), true);
    }
    let beta = match variant {
        CgVariant::FletcherReeves => gg / gp_gp,
        CgVariant::PolakRibiere | CgVariant::PowellBeale => {
            if variant == CgVariant::PowellBeale && dot(g, g_prev).abs() >= POWELL_BEALE_RATIO * gg {
                return (steepest(g), true);
            }
            ((gg - dot(g, g_prev)) / gp_gp).max(0.0)
        }
    };
    let d = g.iter().zip(d_prev).map(|(gi, di)| -gi + beta * di).collect();
    (d, false)
}

fn initial_alpha(g: &[f64]) -> f64 {
    let n = norm(g);
    if n > 0.0 {
        1.0 / n
    } else {
        1.0
    }
}

pub fn step_cg(
    obj: &dyn Objective,
    w: &mut [f64],
    value: f64,
    g: &[f64],
    state: &mut CgState,
    variant: CgVariant,
    hp: &HyperParams,
) -> Result<Step, StopReason> {
    let n = w.len();
    let periodic_restart = state.since_restart >= n;
    let prev = match (&state.prev_grad, periodic_restart) {
        (Some(gp), false) => Some((gp.as_slice(), state.prev_dir.as_slice())),
        _ => None,
    };
    let (mut d, mut restarted) = cg_direction(variant, g, prev);
    if !restarted && dot(g, &d) >= 0.0 {
        d = steepest(g);
        restarted = true;
    }

    let params = WolfeParams::new(hp.ls_c1, hp.cg_c2, hp.ls_max_iter);
    let alpha0 = if restarted || state.prev_alpha <= 0.0 {
        initial_alpha(g)
    } else {
        // previous step scaled by the ratio of directional slopes
        let prev_slope = dot(state.prev_grad.as_deref().unwrap(), &state.prev_dir);
        (state.prev_alpha * prev_slope / dot(g, &d)).clamp(1e-12, 1e12)
    };

    let found = match search_direction(obj, w, value, g, &d, alpha0, &params) {
        Ok(s) => s,
        Err(_) if !restarted => {
            d = steepest(g);
            restarted = true;
            search_direction(obj, w, value, g, &d, initial_alpha(g), &params)
                .map_err(|_| StopReason::StepFailure)?
        }
        Err(_) => return Err(StopReason::StepFailure),
    };
    if !found.value.is_finite() {
        return Err(StopReason::StepFailure);
    }

    w.copy_from_slice(&found.weights);
    state.prev_grad = Some(g.to_vec());
    state.prev_dir = d;
    state.prev_alpha = found.alpha;
    state.since_restart = if restarted { 1 } else { state.since_restart + 1 };
    Ok(Step { accepted: true, value: found.value, gradient: found.gradient })
}
