//! Closed-form objectives used to exercise the optimizers.

use nalgebra::{DMatrix, DVector};

use super::Objective;

/// `f(x) = 1/2 (x - x*)^T A (x - x*)` with `A` symmetric positive definite.
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub a: DMatrix<f64>,
    pub minimizer: DVector<f64>,
}

impl Quadratic {
    /// Diagonal quadratic with the given curvatures, minimised at the origin.
    pub fn diagonal(curvatures: &[f64]) -> Self {
        let n = curvatures.len();
        Self { a: DMatrix::from_diagonal(&DVector::from_row_slice(curvatures)), minimizer: DVector::zeros(n) }
    }

    pub fn new(a: DMatrix<f64>, minimizer: DVector<f64>) -> Self {
        assert_eq!(a.nrows(), minimizer.len());
        Self { a, minimizer }
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.minimizer.len()
    }

    fn value(&self, w: &[f64]) -> f64 {
        let d = DVector::from_row_slice(w) - &self.minimizer;
        0.5 * d.dot(&(&self.a * &d))
    }

    fn value_and_gradient(&self, w: &[f64]) -> (f64, Vec<f64>) {
        let d = DVector::from_row_slice(w) - &self.minimizer;
        let g = &self.a * &d;
        (0.5 * d.dot(&g), g.iter().copied().collect())
    }
}

/// Linear model `y = X w` fitted by mean squared error; residuals are `y - X w`.
#[derive(Debug, Clone)]
pub struct LinearLeastSquares {
    pub design: DMatrix<f64>,
    pub targets: DVector<f64>,
}

impl LinearLeastSquares {
    pub fn new(design: DMatrix<f64>, targets: DVector<f64>) -> Self {
        assert_eq!(design.nrows(), targets.len());
        Self { design, targets }
    }

    fn residuals(&self, w: &[f64]) -> DVector<f64> {
        &self.targets - &self.design * DVector::from_row_slice(w)
    }
}

impl Objective for LinearLeastSquares {
    fn dim(&self) -> usize {
        self.design.ncols()
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.residuals(w).norm_squared() / self.targets.len() as f64
    }

    fn value_and_gradient(&self, w: &[f64]) -> (f64, Vec<f64>) {
        let e = self.residuals(w);
        let n = self.targets.len() as f64;
        let g = self.design.transpose() * &e * (-2.0 / n);
        (e.norm_squared() / n, g.iter().copied().collect())
    }

    fn residuals_and_jacobian(&self, w: &[f64]) -> Option<(Vec<f64>, DMatrix<f64>)> {
        Some((self.residuals(w).iter().copied().collect(), -self.design.clone()))
    }
}
