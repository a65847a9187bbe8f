//! Levenberg-Marquardt with multiplicative damping adaptation.

use nalgebra::{DMatrix, DVector};

use super::{all_finite, HyperParams, Objective, Step, StopReason};

/// Damping never decays below this, so the system stays positive definite.
const MU_FLOOR: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq)]
pub struct LmState {
    pub mu: f64,
}

impl LmState {
    pub fn new(hp: &HyperParams) -> Self {
        Self { mu: hp.mu0 }
    }
}

/// One damped solve attempted during an epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct LmTrial {
    pub mu: f64,
    /// Objective at the tentative weights; `None` when the system could not be factorised.
    pub value: Option<f64>,
    pub accepted: bool,
}

/// Solves `(J^T J + mu I) dw = -J^T e` by Cholesky factorisation.
/// Returns `None` when the matrix is not numerically positive definite.
pub fn lm_solve(jtj: &DMatrix<f64>, jte: &DVector<f64>, mu: f64) -> Option<DVector<f64>> {
    let n = jtj.nrows();
    let system = jtj + DMatrix::identity(n, n) * mu;
    let chol = system.cholesky()?;
    let dw = chol.solve(&(-jte));
    dw.iter().all(|v| v.is_finite()).then_some(dw)
}

/// One epoch: re-solve with growing damping until the MSE decreases or
/// `mu` exceeds `mu_max`. The trial log is returned alongside the step.
pub fn step_lm(
    obj: &dyn Objective,
    w: &mut [f64],
    value: f64,
    state: &mut LmState,
    hp: &HyperParams,
) -> Result<(Step, Vec<LmTrial>), StopReason> {
    let (e, jac) = obj.residuals_and_jacobian(w).ok_or(StopReason::StepFailure)?;
    let e = DVector::from_vec(e);
    let jt = jac.transpose();
    let jtj = &jt * &jac;
    let jte = &jt * &e;
    if !all_finite(jtj.as_slice()) || !all_finite(jte.as_slice()) {
        return Err(StopReason::StepFailure);
    }

    let mut trials = Vec::new();
    loop {
        if state.mu > hp.mu_max {
            return Err(StopReason::MuOverflow);
        }
        let tentative = lm_solve(&jtj, &jte, state.mu).map(|dw| {
            let trial: Vec<f64> = w.iter().zip(dw.iter()).map(|(a, b)| a + b).collect();
            let v = if all_finite(&trial) { obj.value(&trial) } else { f64::NAN };
            (trial, v)
        });
        match tentative {
            Some((trial, v)) if v < value => {
                trials.push(LmTrial { mu: state.mu, value: Some(v), accepted: true });
                state.mu = (state.mu * hp.mu_dec).max(MU_FLOOR);
                let (v, gradient) = obj.value_and_gradient(&trial);
                if !all_finite(&gradient) {
                    return Err(StopReason::StepFailure);
                }
                w.copy_from_slice(&trial);
                return Ok((Step { accepted: true, value: v, gradient }, trials));
            }
            other => {
                trials.push(LmTrial { mu: state.mu, value: other.map(|(_, v)| v), accepted: false });
                state.mu *= hp.mu_inc;
            }
        }
    }
}
