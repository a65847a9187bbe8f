//! Strong-Wolfe line search (bracketing followed by zoom with cubic
//! interpolation).
//!
//! The search works on `phi(alpha) = f(w + alpha d)` and needs both the
//! value and the slope `phi'(alpha) = g(w + alpha d)^T d` at every trial.

use thiserror::Error;

use super::{all_finite, dot, Objective};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum LineSearchError {
    #[error("search direction is not a descent direction")]
    NotDescent,
    #[error("no step satisfying the Wolfe conditions was bracketed")]
    BracketFailure,
    #[error("zoom phase did not converge")]
    ZoomFailure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolfeParams {
    pub c1: f64,
    pub c2: f64,
    pub max_iter: usize,
    pub alpha_max: f64,
}

impl WolfeParams {
    pub fn new(c1: f64, c2: f64, max_iter: usize) -> Self {
        Self { c1, c2, max_iter, alpha_max: 1e20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchResult {
    pub alpha: f64,
    pub value: f64,
    pub slope: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Trial {
    alpha: f64,
    value: f64,
    slope: f64,
}

/// Minimiser of the cubic matching values and slopes at `a` and `b`,
/// or `None` when the cubic has no interior minimum.
fn cubic_minimizer(a: Trial, b: Trial) -> Option<f64> {
    let d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.alpha - b.alpha);
    let disc = d1 * d1 - a.slope * b.slope;
    if !(disc >= 0.0) {
        return None;
    }
    let d2 = (b.alpha - a.alpha).signum() * disc.sqrt();
    let denom = b.slope - a.slope + 2.0 * d2;
    if denom == 0.0 {
        return None;
    }
    let x = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom;
    x.is_finite().then_some(x)
}

/// Finds `alpha` with
/// `phi(alpha) <= phi(0) + c1 alpha phi'(0)` and `|phi'(alpha)| <= c2 |phi'(0)|`.
pub fn line_search<F>(
    mut phi: F,
    phi0: f64,
    slope0: f64,
    alpha_init: f64,
    params: &WolfeParams,
) -> Result<LineSearchResult, LineSearchError>
where
    F: FnMut(f64) -> (f64, f64),
{
    if !(slope0 < 0.0) {
        return Err(LineSearchError::NotDescent);
    }
    let mut evaluations = 0;
    let mut eval = |alpha: f64| {
        evaluations += 1;
        let (value, slope) = phi(alpha);
        // non-finite trials count as "too far"
        if value.is_finite() && slope.is_finite() {
            Trial { alpha, value, slope }
        } else {
            Trial { alpha, value: f64::INFINITY, slope: f64::NAN }
        }
    };
    let sufficient = |t: &Trial| t.value <= phi0 + params.c1 * t.alpha * slope0;
    let curvature = |t: &Trial| t.slope.abs() <= -params.c2 * slope0;

    let origin = Trial { alpha: 0.0, value: phi0, slope: slope0 };
    let mut prev = origin;
    let mut alpha = alpha_init.min(params.alpha_max);
    let mut bracket = None;
    for i in 0..params.max_iter {
        let t = eval(alpha);
        if !sufficient(&t) || (i > 0 && t.value >= prev.value) {
            bracket = Some((prev, t));
            break;
        }
        if curvature(&t) {
            return Ok(LineSearchResult { alpha: t.alpha, value: t.value, slope: t.slope, evaluations });
        }
        if t.slope >= 0.0 {
            bracket = Some((t, prev));
            break;
        }
        if alpha >= params.alpha_max {
            return Err(LineSearchError::BracketFailure);
        }
        prev = t;
        alpha = (2.0 * alpha).min(params.alpha_max);
    }
    let (mut lo, mut hi) = bracket.ok_or(LineSearchError::BracketFailure)?;

    for _ in 0..params.max_iter {
        let (left, right) = if lo.alpha < hi.alpha { (lo.alpha, hi.alpha) } else { (hi.alpha, lo.alpha) };
        let width = right - left;
        if width <= 1e-16 * right.abs().max(1e-300) {
            break;
        }
        // Interpolate when the cubic is well defined and not hugging an end.
        let mid = 0.5 * (left + right);
        let guard = 0.1 * width;
        let alpha = match (hi.value.is_finite() && hi.slope.is_finite()).then(|| cubic_minimizer(lo, hi)).flatten() {
            Some(x) if x > left + guard && x < right - guard => x,
            _ => mid,
        };
        let t = eval(alpha);
        if !sufficient(&t) || t.value >= lo.value {
            hi = t;
        } else {
            if curvature(&t) {
                return Ok(LineSearchResult { alpha: t.alpha, value: t.value, slope: t.slope, evaluations });
            }
            if t.slope * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = t;
        }
    }
    Err(LineSearchError::ZoomFailure)
}

/// Outcome of a search along `d` from `w` on a full objective.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalStep {
    pub alpha: f64,
    pub weights: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub evaluations: usize,
}

/// Runs [`line_search`] on `obj` along `d`, returning the new point with its
/// value and gradient.
pub fn search_direction(
    obj: &dyn Objective,
    w: &[f64],
    value: f64,
    g: &[f64],
    d: &[f64],
    alpha_init: f64,
    params: &WolfeParams,
) -> Result<DirectionalStep, LineSearchError> {
    let point = |alpha: f64| -> Vec<f64> { w.iter().zip(d).map(|(a, b)| a + alpha * b).collect() };
    let mut last: Option<(f64, f64, Vec<f64>)> = None;
    let result = line_search(
        |alpha| {
            let x = point(alpha);
            if !all_finite(&x) {
                return (f64::NAN, f64::NAN);
            }
            let (v, grad) = obj.value_and_gradient(&x);
            let slope = dot(&grad, d);
            last = Some((alpha, v, grad));
            (v, slope)
        },
        value,
        dot(g, d),
        alpha_init,
        params,
    )?;
    let weights = point(result.alpha);
    let (value, gradient) = match last {
        Some((a, v, grad)) if a == result.alpha => (v, grad),
        _ => obj.value_and_gradient(&weights),
    };
    Ok(DirectionalStep { alpha: result.alpha, weights, value, gradient, evaluations: result.evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parabola(alpha: f64) -> (f64, f64) {
        // f(w) = w^2 from w = 1 along d = -2
        let w = 1.0 - 2.0 * alpha;
        (w * w, 2.0 * w * -2.0)
    }

    #[test]
    fn parabola_step_satisfies_strong_wolfe() {
        for &(c1, c2) in &[(1e-4, 0.9), (1e-4, 0.1), (1e-4, 1e-6)] {
            for &a0 in &[1e-3, 0.1, 0.5, 1.0, 7.0] {
                let p = WolfeParams::new(c1, c2, 50);
                let r = line_search(parabola, 1.0, -4.0, a0, &p).unwrap();
                let (v, s) = parabola(r.alpha);
                assert!(v <= 1.0 + c1 * r.alpha * -4.0, "c2={c2} a0={a0}");
                assert!(s.abs() <= c2 * 4.0, "c2={c2} a0={a0}");
            }
        }
        // a tight curvature constant pins the exact minimiser alpha = 0.5
        let r = line_search(parabola, 1.0, -4.0, 1.0, &WolfeParams::new(1e-4, 1e-9, 50)).unwrap();
        assert!((r.alpha - 0.5).abs() < 1e-9);
    }

    #[test]
    fn ascent_direction_is_rejected() {
        let up = |alpha: f64| {
            let w = 1.0 + alpha;
            (w * w, 2.0 * w)
        };
        assert_eq!(line_search(up, 1.0, 2.0, 1.0, &WolfeParams::new(1e-4, 0.9, 50)), Err(LineSearchError::NotDescent));
    }

    #[test]
    fn unbounded_linear_descent_fails_to_bracket() {
        let linear = |alpha: f64| (1.0 - alpha, -1.0);
        let r = line_search(linear, 1.0, -1.0, 1.0, &WolfeParams::new(1e-4, 0.9, 50));
        assert_eq!(r, Err(LineSearchError::BracketFailure));
    }

    #[test]
    fn evaluations_are_bounded() {
        let r = line_search(parabola, 1.0, -4.0, 1e-9, &WolfeParams::new(1e-4, 0.1, 50)).unwrap();
        assert!(r.evaluations <= 100);
    }

    #[test]
    fn cubic_interpolation_is_exact_on_quadratics() {
        let a = Trial { alpha: 0.0, value: 1.0, slope: -4.0 };
        let (v, s) = parabola(0.9);
        let b = Trial { alpha: 0.9, value: v, slope: s };
        assert!((cubic_minimizer(a, b).unwrap() - 0.5).abs() < 1e-12);
    }
}
