//! BFGS with a dense inverse-Hessian approximation, and Battiti's one-step
//! secant method (memoryless BFGS from the identity).

use nalgebra::{DMatrix, DVector};

use super::line_search::{search_direction, DirectionalStep, WolfeParams};
use super::{dot, norm, HyperParams, Objective, Step, StopReason};

/// Curvature pairs with `s^T y` at or below this are discarded.
const MIN_CURVATURE: f64 = 1e-12;

fn first_alpha(g: &[f64]) -> f64 {
    let n = norm(g);
    if n > 1.0 {
        1.0 / n
    } else {
        1.0
    }
}

fn difference(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfgsState {
    /// Inverse-Hessian approximation.
    pub h: DMatrix<f64>,
    pub is_identity: bool,
}

impl BfgsState {
    pub fn new(n: usize) -> Self {
        Self { h: DMatrix::identity(n, n), is_identity: true }
    }

    fn reset(&mut self) {
        let n = self.h.nrows();
        self.h = DMatrix::identity(n, n);
        self.is_identity = true;
    }
}

/// Inverse BFGS update with step `s` and gradient change `y`.
/// Returns `false` (and resets `h` to the identity) when `s^T y` is too small.
pub fn bfgs_update(h: &mut DMatrix<f64>, s: &[f64], y: &[f64]) -> bool {
    let sy = dot(s, y);
    if !(sy > MIN_CURVATURE) {
        let n = h.nrows();
        *h = DMatrix::identity(n, n);
        return false;
    }
    let s = DVector::from_row_slice(s);
    let y = DVector::from_row_slice(y);
    let rho = 1.0 / sy;
    let hy = &*h * &y;
    let yhy = y.dot(&hy);
    let ss = &s * s.transpose();
    let cross = &hy * s.transpose();
    *h += ss * (rho * rho * yhy + rho) - (&cross + cross.transpose()) * rho;
    true
}

pub fn step_bfgs(
    obj: &dyn Objective,
    w: &mut [f64],
    value: f64,
    g: &[f64],
    state: &mut BfgsState,
    hp: &HyperParams,
) -> Result<Step, StopReason> {
    let params = WolfeParams::new(hp.ls_c1, hp.qn_c2, hp.ls_max_iter);
    let mut d: Vec<f64> = (&state.h * DVector::from_row_slice(g)).iter().map(|v| -v).collect();
    if !(dot(g, &d) < 0.0) {
        state.reset();
        d = g.iter().map(|v| -v).collect();
    }
    let alpha0 = if state.is_identity { first_alpha(g) } else { 1.0 };
    let found = match search_direction(obj, w, value, g, &d, alpha0, &params) {
        Ok(s) => s,
        Err(_) if !state.is_identity => {
            state.reset();
            d = g.iter().map(|v| -v).collect();
            search_direction(obj, w, value, g, &d, first_alpha(g), &params).map_err(|_| StopReason::StepFailure)?
        }
        Err(_) => return Err(StopReason::StepFailure),
    };
    let DirectionalStep { weights, value: new_value, gradient, .. } = found;
    let s = difference(&weights, w);
    let y = difference(&gradient, g);
    state.is_identity = !bfgs_update(&mut state.h, &s, &y);
    w.copy_from_slice(&weights);
    Ok(Step { accepted: true, value: new_value, gradient })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OssState {
    /// Last accepted step `s` and gradient change `y`.
    pub last_pair: Option<(Vec<f64>, Vec<f64>)>,
}

impl OssState {
    pub fn new() -> Self {
        Self::default()
    }
}

/// `d = -g + A s + B y` with
/// `A = -(1 + y'y / s'y) (s'g / s'y) + y'g / s'y` and `B = s'g / s'y`.
/// Falls back to `-g` when `s'y` is not positive.
pub fn oss_direction(g: &[f64], s: &[f64], y: &[f64]) -> Vec<f64> {
    let sy = dot(s, y);
    if !(sy > MIN_CURVATURE) {
        return g.iter().map(|v| -v).collect();
    }
    let sg = dot(s, g);
    let yg = dot(y, g);
    let yy = dot(y, y);
    let b = sg / sy;
    let a = -(1.0 + yy / sy) * b + yg / sy;
    g.iter().zip(s).zip(y).map(|((gi, si), yi)| -gi + a * si + b * yi).collect()
}

pub fn step_oss(
    obj: &dyn Objective,
    w: &mut [f64],
    value: f64,
    g: &[f64],
    state: &mut OssState,
    hp: &HyperParams,
) -> Result<Step, StopReason> {
    let params = WolfeParams::new(hp.ls_c1, hp.qn_c2, hp.ls_max_iter);
    let steepest: Vec<f64> = g.iter().map(|v| -v).collect();
    let (mut d, mut restarted) = match &state.last_pair {
        Some((s, y)) => (oss_direction(g, s, y), false),
        None => (steepest.clone(), true),
    };
    if !restarted && !(dot(g, &d) < 0.0) {
        d = steepest.clone();
        restarted = true;
    }
    let alpha0 = if restarted { first_alpha(g) } else { 1.0 };
    let found = match search_direction(obj, w, value, g, &d, alpha0, &params) {
        Ok(s) => s,
        Err(_) if !restarted => search_direction(obj, w, value, g, &steepest, first_alpha(g), &params)
            .map_err(|_| StopReason::StepFailure)?,
        Err(_) => return Err(StopReason::StepFailure),
    };
    let s = difference(&found.weights, w);
    let y = difference(&found.gradient, g);
    state.last_pair = Some((s, y));
    w.copy_from_slice(&found.weights);
    Ok(Step { accepted: true, value: found.value, gradient: found.gradient })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::problems::Quadratic;

    #[test]
    fn first_bfgs_direction_is_steepest_descent() {
        let state = BfgsState::new(3);
        let g = DVector::from_row_slice(&[1.0, -2.0, 0.5]);
        assert_eq!(-(&state.h * &g), -g);
    }

    #[test]
    fn update_satisfies_secant_condition() {
        let mut h = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 0.5]);
        let s = [0.4, -0.2, 0.7];
        let y = [1.0, 0.1, 0.9];
        assert!(bfgs_update(&mut h, &s, &y));
        let hy = &h * DVector::from_row_slice(&y);
        for i in 0..3 {
            assert!((hy[i] - s[i]).abs() < 1e-10);
        }
        // symmetric
        assert!((&h - h.transpose()).amax() < 1e-12);
    }

    #[test]
    fn non_positive_curvature_resets_to_identity() {
        let mut h = DMatrix::from_element(2, 2, 3.0);
        assert!(!bfgs_update(&mut h, &[1.0, 0.0], &[-1.0, 0.0]));
        assert_eq!(h, DMatrix::identity(2, 2));
    }

    #[test]
    fn bfgs_converges_on_2d_quadratic() {
        let a = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
        let q = Quadratic::new(a, DVector::from_row_slice(&[1.0, -1.0]));
        let hp = HyperParams::default();
        let mut w = vec![-2.0, 3.0];
        let (mut v, mut g) = q.value_and_gradient(&w);
        let mut state = BfgsState::new(2);
        let mut epochs = 0;
        while norm(&g) >= 1e-8 {
            let step = step_bfgs(&q, &mut w, v, &g, &mut state, &hp).unwrap();
            v = step.value;
            g = step.gradient;
            epochs += 1;
            assert!(epochs <= 10, "no convergence after {epochs} epochs");
        }
    }

    #[test]
    fn oss_first_step_is_steepest_descent() {
        let d = oss_direction(&[1.0, 2.0], &[0.0, 0.0], &[0.0, 0.0]);
        assert_eq!(d, vec![-1.0, -2.0]);
    }

    #[test]
    fn oss_moves_only_along_s_and_y_when_they_are_orthogonal_to_g() {
        let g = [1.0, 0.0, 0.0];
        let d = oss_direction(&g, &[0.0, 1.0, 0.0], &[0.0, 0.5, 0.5]);
        assert_eq!(d, vec![-1.0, 0.0, 0.0]);
    }

    #[test]
    fn oss_secant_direction_is_newton_in_1d() {
        let curvature = 3.0;
        let q = Quadratic::diagonal(&[curvature]);
        let hp = HyperParams::default();
        let mut w = vec![2.0];
        let (v, g) = q.value_and_gradient(&w);
        let mut state = OssState::new();
        let step = step_oss(&q, &mut w, v, &g, &mut state, &hp).unwrap();
        let (s, y) = state.last_pair.clone().unwrap();
        let d = oss_direction(&step.gradient, &s, &y);
        let newton = -step.gradient[0] / curvature;
        assert!((d[0] - newton).abs() < 1e-10 * newton.abs().max(1.0));
    }
}
