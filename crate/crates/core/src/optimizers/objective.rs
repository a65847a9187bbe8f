use nalgebra::DMatrix;

use crate::network::{self, NetworkError, Sample, Topology, Weights};

/// A differentiable function of a flat parameter vector.
pub trait Objective {
    fn dim(&self) -> usize;

    fn value(&self, w: &[f64]) -> f64;

    fn value_and_gradient(&self, w: &[f64]) -> (f64, Vec<f64>);

    /// Residuals `e` and `J = de/dw` when the objective is `mean(e^2)`.
    /// Only Levenberg-Marquardt needs this.
    fn residuals_and_jacobian(&self, _w: &[f64]) -> Option<(Vec<f64>, DMatrix<f64>)> {
        None
    }
}

/// Batch MSE of a network over a fixed set of samples.
#[derive(Debug, Clone)]
pub struct NetworkObjective<'a> {
    topology: &'a Topology,
    data: &'a [Sample],
}

impl<'a> NetworkObjective<'a> {
    pub fn new(topology: &'a Topology, data: &'a [Sample]) -> Result<Self, NetworkError> {
        if data.is_empty() {
            return Err(NetworkError::EmptyData);
        }
        if let Some(bad) = data.iter().find(|s| s.inputs.len() != topology.inputs()) {
            return Err(NetworkError::DimensionMismatch { expected: topology.inputs(), found: bad.inputs.len() });
        }
        Ok(Self { topology, data })
    }

    fn weights(&self, w: &[f64]) -> Weights {
        Weights { values: w.to_vec() }
    }
}

// Dimensions are checked in `new`, so the network calls below cannot fail.
impl Objective for NetworkObjective<'_> {
    fn dim(&self) -> usize {
        self.topology.param_count()
    }

    fn value(&self, w: &[f64]) -> f64 {
        network::mse(&self.weights(w), self.topology, self.data).expect("validated dimensions")
    }

    fn value_and_gradient(&self, w: &[f64]) -> (f64, Vec<f64>) {
        network::mse_and_gradient(&self.weights(w), self.topology, self.data).expect("validated dimensions")
    }

    fn residuals_and_jacobian(&self, w: &[f64]) -> Option<(Vec<f64>, DMatrix<f64>)> {
        Some(network::residuals_and_jacobian(&self.weights(w), self.topology, self.data).expect("validated dimensions"))
    }
}
