//! Fully connected feedforward network with a single output.
//!
//! Parameters live in one flat vector so every optimizer can treat the
//! network as a point in R^n. Layer `l` (0-based over non-input layers)
//! stores, for each neuron in turn, its `fan_in` incoming weights followed
//! by its bias.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no samples")]
    EmptyData,
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("cannot parse weights: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    /// tanh-shaped, range (-1, 1).
    SigmoidSymmetric,
    /// 1 / (1 + e^-x), range (0, 1).
    SigmoidLogistic,
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::SigmoidSymmetric => x.tanh(),
            Activation::SigmoidLogistic => 1.0 / (1.0 + (-x).exp()),
            Activation::Linear => x,
        }
    }

    /// Derivative expressed through the activation's output `y`.
    #[inline]
    pub fn derivative_at_output(self, y: f64) -> f64 {
        match self {
            Activation::SigmoidSymmetric => 1.0 - y * y,
            Activation::SigmoidLogistic => y * (1.0 - y),
            Activation::Linear => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::SigmoidSymmetric => "sigmoid_symmetric",
            Activation::SigmoidLogistic => "sigmoid_logistic",
            Activation::Linear => "linear",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sigmoid_symmetric" | "tansig" | "tanh" => Ok(Activation::SigmoidSymmetric),
            "sigmoid_logistic" | "logsig" | "logistic" => Ok(Activation::SigmoidLogistic),
            "linear" | "purelin" => Ok(Activation::Linear),
            other => Err(NetworkError::InvalidTopology(format!("unknown activation `{other}`"))),
        }
    }
}

/// Where a flat parameter lives in the layered structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSlot {
    Weight { layer: usize, row: usize, col: usize },
    Bias { layer: usize, row: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    layer_sizes: Vec<usize>,
    activations: Vec<Activation>,
    offsets: Vec<usize>,
}

impl Topology {
    /// `layer_sizes` includes the input layer; `activations` has one entry
    /// per non-input layer. The output layer must have exactly one unit.
    pub fn new(layer_sizes: Vec<usize>, activations: Vec<Activation>) -> Result<Self, NetworkError> {
        if layer_sizes.len() < 2 {
            return Err(NetworkError::InvalidTopology(
                "need an input layer and at least one non-input layer".into(),
            ));
        }
        if layer_sizes.iter().any(|&s| s == 0) {
            return Err(NetworkError::InvalidTopology("layer sizes must be positive".into()));
        }
        if *layer_sizes.last().unwrap() != 1 {
            return Err(NetworkError::InvalidTopology("output layer must have one unit".into()));
        }
        if activations.len() != layer_sizes.len() - 1 {
            return Err(NetworkError::InvalidTopology(format!(
                "{} activations for {} non-input layers",
                activations.len(),
                layer_sizes.len() - 1
            )));
        }
        let mut offsets = Vec::with_capacity(layer_sizes.len());
        let mut acc = 0;
        offsets.push(0);
        for w in layer_sizes.windows(2) {
            acc += (w[0] + 1) * w[1];
            offsets.push(acc);
        }
        Ok(Self { layer_sizes, activations, offsets })
    }

    /// Symmetric-sigmoid hidden layers with a linear output.
    pub fn with_default_activations(layer_sizes: Vec<usize>) -> Result<Self, NetworkError> {
        let n = layer_sizes.len().saturating_sub(1);
        let mut acts = vec![Activation::SigmoidSymmetric; n];
        if let Some(last) = acts.last_mut() {
            *last = Activation::Linear;
        }
        Self::new(layer_sizes, acts)
    }

    /// The 6-10-1 network used by the experiment.
    pub fn default_experiment() -> Self {
        Self::with_default_activations(vec![6, 10, 1]).unwrap()
    }

    /// Parses `6-10-1` style layer lists.
    pub fn parse_sizes(s: &str) -> Result<Vec<usize>, NetworkError> {
        s.split('-')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| NetworkError::InvalidTopology(format!("bad layer size `{p}` in `{s}`")))
            })
            .collect()
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn inputs(&self) -> usize {
        self.layer_sizes[0]
    }

    /// Number of non-input layers.
    pub fn depth(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    pub fn param_count(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn sizes_string(&self) -> String {
        self.layer_sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("-")
    }

    #[inline]
    fn fan_in(&self, layer: usize) -> usize {
        self.layer_sizes[layer]
    }

    #[inline]
    fn fan_out(&self, layer: usize) -> usize {
        self.layer_sizes[layer + 1]
    }

    pub fn weight_index(&self, layer: usize, row: usize, col: usize) -> usize {
        debug_assert!(row < self.fan_out(layer) && col < self.fan_in(layer));
        self.offsets[layer] + row * (self.fan_in(layer) + 1) + col
    }

    pub fn bias_index(&self, layer: usize, row: usize) -> usize {
        debug_assert!(row < self.fan_out(layer));
        self.offsets[layer] + row * (self.fan_in(layer) + 1) + self.fan_in(layer)
    }

    pub fn flat_index(&self, slot: ParamSlot) -> usize {
        match slot {
            ParamSlot::Weight { layer, row, col } => self.weight_index(layer, row, col),
            ParamSlot::Bias { layer, row } => self.bias_index(layer, row),
        }
    }

    pub fn slot(&self, flat: usize) -> Option<ParamSlot> {
        if flat >= self.param_count() {
            return None;
        }
        let layer = self.offsets.partition_point(|&o| o <= flat) - 1;
        let stride = self.fan_in(layer) + 1;
        let local = flat - self.offsets[layer];
        let (row, col) = (local / stride, local % stride);
        Some(if col == self.fan_in(layer) {
            ParamSlot::Bias { layer, row }
        } else {
            ParamSlot::Weight { layer, row, col }
        })
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let acts: Vec<&str> = self.activations.iter().map(|a| a.name()).collect();
        write!(f, "{} {}", self.sizes_string(), acts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitScheme {
    /// Every parameter uniform in [-0.5, 0.5].
    UniformSymmetric,
    /// Nguyen-Widrow scaling on sigmoid layers, uniform elsewhere.
    NguyenWidrow,
}

impl InitScheme {
    pub fn name(self) -> &'static str {
        match self {
            InitScheme::UniformSymmetric => "uniform_symmetric",
            InitScheme::NguyenWidrow => "nguyen_widrow",
        }
    }
}

impl FromStr for InitScheme {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "uniform_symmetric" => Ok(InitScheme::UniformSymmetric),
            "nguyen_widrow" => Ok(InitScheme::NguyenWidrow),
            other => Err(NetworkError::InvalidTopology(format!("unknown init scheme `{other}`"))),
        }
    }
}

/// All trainable parameters in flat order (see [`Topology::slot`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub values: Vec<f64>,
}

impl Weights {
    pub fn zeros(t: &Topology) -> Self {
        Self { values: vec![0.0; t.param_count()] }
    }

    pub fn from_vec(t: &Topology, values: Vec<f64>) -> Result<Self, NetworkError> {
        if values.len() != t.param_count() {
            return Err(NetworkError::DimensionMismatch { expected: t.param_count(), found: values.len() });
        }
        Ok(Self { values })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Header line `topology <sizes> <activations>` followed by one value per
    /// line with 17 significant digits.
    pub fn to_text(&self, t: &Topology) -> String {
        let mut out = format!("topology {t}\n");
        for v in &self.values {
            out.push_str(&format!("{v:.16e}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<(Topology, Weights), NetworkError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| NetworkError::Parse("empty input".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("topology") {
            return Err(NetworkError::Parse("missing `topology` header".into()));
        }
        let sizes = Topology::parse_sizes(parts.next().unwrap_or(""))?;
        let acts = parts
            .next()
            .ok_or_else(|| NetworkError::Parse("missing activations".into()))?
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<Activation>, _>>()?;
        let topology = Topology::new(sizes, acts)?;
        let values = lines
            .map(|l| l.trim().parse::<f64>().map_err(|_| NetworkError::Parse(format!("bad value `{l}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let w = Weights::from_vec(&topology, values)?;
        Ok((topology, w))
    }
}

/// Deterministic in `(t, seed, scheme)`.
pub fn init_weights(t: &Topology, seed: u64, scheme: InitScheme) -> Weights {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Weights::zeros(t);
    for layer in 0..t.depth() {
        let fan_in = t.fan_in(layer);
        let fan_out = t.fan_out(layer);
        let nw = scheme == InitScheme::NguyenWidrow && t.activations[layer] != Activation::Linear;
        let beta = 0.7 * (fan_out as f64).powf(1.0 / fan_in as f64);
        for row in 0..fan_out {
            let start = t.weight_index(layer, row, 0);
            let neuron = &mut w.values[start..start + fan_in + 1];
            for v in neuron.iter_mut() {
                *v = rng.random_range(-0.5..=0.5);
            }
            if nw {
                let norm = neuron[..fan_in].iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for v in &mut neuron[..fan_in] {
                        *v *= beta / norm;
                    }
                }
                neuron[fan_in] *= 2.0 * beta;
            }
        }
    }
    w
}

/// One training/evaluation pattern: network inputs and the scalar target.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub inputs: Vec<f64>,
    pub target: f64,
}

impl Sample {
    pub fn new(inputs: Vec<f64>, target: f64) -> Self {
        Self { inputs, target }
    }
}

/// Per-layer pre-activations and outputs from one forward pass.
/// `outputs[0]` is the input vector itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    pub pre: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
}

impl ForwardCache {
    fn new(t: &Topology) -> Self {
        Self {
            pre: t.layer_sizes[1..].iter().map(|&n| vec![0.0; n]).collect(),
            outputs: t.layer_sizes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn output(&self) -> f64 {
        self.outputs.last().unwrap()[0]
    }
}

fn check_dims(w: &Weights, t: &Topology) -> Result<(), NetworkError> {
    if w.len() != t.param_count() {
        return Err(NetworkError::DimensionMismatch { expected: t.param_count(), found: w.len() });
    }
    Ok(())
}

fn check_sample(t: &Topology, x: &[f64]) -> Result<(), NetworkError> {
    if x.len() != t.inputs() {
        return Err(NetworkError::DimensionMismatch { expected: t.inputs(), found: x.len() });
    }
    Ok(())
}

fn forward_into(w: &[f64], t: &Topology, x: &[f64], cache: &mut ForwardCache) {
    cache.outputs[0].copy_from_slice(x);
    for layer in 0..t.depth() {
        let fan_in = t.fan_in(layer);
        let act = t.activations[layer];
        let (prev, next) = cache.outputs.split_at_mut(layer + 1);
        let input = &prev[layer];
        let out = &mut next[0];
        let pre = &mut cache.pre[layer];
        for row in 0..t.fan_out(layer) {
            let start = t.weight_index(layer, row, 0);
            let neuron = &w[start..start + fan_in + 1];
            let z = neuron[..fan_in].iter().zip(input.iter()).map(|(a, b)| a * b).sum::<f64>()
                + neuron[fan_in];
            pre[row] = z;
            out[row] = act.apply(z);
        }
    }
}

/// Accumulates `seed * d(output)/d(param)` into `grad` using a cache from
/// [`forward_into`]. `deltas` is scratch space shaped like the non-input layers.
fn backprop_into(
    w: &[f64],
    t: &Topology,
    cache: &ForwardCache,
    seed: f64,
    deltas: &mut [Vec<f64>],
    grad: &mut [f64],
) {
    let last = t.depth() - 1;
    for (d, &y) in deltas[last].iter_mut().zip(&cache.outputs[last + 1]) {
        *d = seed * t.activations[last].derivative_at_output(y);
    }
    for layer in (0..t.depth()).rev() {
        let fan_in = t.fan_in(layer);
        let input = &cache.outputs[layer];
        for row in 0..t.fan_out(layer) {
            let delta = deltas[layer][row];
            let start = t.weight_index(layer, row, 0);
            let g = &mut grad[start..start + fan_in + 1];
            for (gi, xi) in g[..fan_in].iter_mut().zip(input) {
                *gi += delta * xi;
            }
            g[fan_in] += delta;
        }
        if layer > 0 {
            let act = t.activations[layer - 1];
            let (lower, upper) = deltas.split_at_mut(layer);
            let below = &mut lower[layer - 1];
            for (col, b) in below.iter_mut().enumerate() {
                let mut s = 0.0;
                for (row, d) in upper[0].iter().enumerate() {
                    s += w[t.weight_index(layer, row, col)] * d;
                }
                *b = s * act.derivative_at_output(cache.outputs[layer][col]);
            }
        }
    }
}

fn delta_scratch(t: &Topology) -> Vec<Vec<f64>> {
    t.layer_sizes[1..].iter().map(|&n| vec![0.0; n]).collect()
}

pub fn forward(w: &Weights, t: &Topology, x: &[f64]) -> Result<(f64, ForwardCache), NetworkError> {
    check_dims(w, t)?;
    check_sample(t, x)?;
    let mut cache = ForwardCache::new(t);
    forward_into(&w.values, t, x, &mut cache);
    Ok((cache.output(), cache))
}

/// Network output for every sample.
pub fn predict(w: &Weights, t: &Topology, data: &[Sample]) -> Result<Vec<f64>, NetworkError> {
    check_dims(w, t)?;
    let mut cache = ForwardCache::new(t);
    data.iter()
        .map(|s| {
            check_sample(t, &s.inputs)?;
            forward_into(&w.values, t, &s.inputs, &mut cache);
            Ok(cache.output())
        })
        .collect()
}

/// Errors `e_i = target_i - output_i`.
pub fn residuals(w: &Weights, t: &Topology, data: &[Sample]) -> Result<Vec<f64>, NetworkError> {
    let out = predict(w, t, data)?;
    Ok(data.iter().zip(out).map(|(s, y)| s.target - y).collect())
}

/// Mean over samples of the squared error.
pub fn mse(w: &Weights, t: &Topology, data: &[Sample]) -> Result<f64, NetworkError> {
    if data.is_empty() {
        return Err(NetworkError::EmptyData);
    }
    let e = residuals(w, t, data)?;
    Ok(e.iter().map(|e| e * e).sum::<f64>() / data.len() as f64)
}

/// Batch gradient of [`mse`] with respect to the flat parameters.
pub fn gradient(w: &Weights, t: &Topology, data: &[Sample]) -> Result<Vec<f64>, NetworkError> {
    mse_and_gradient(w, t, data).map(|(_, g)| g)
}

pub fn mse_and_gradient(w: &Weights, t: &Topology, data: &[Sample]) -> Result<(f64, Vec<f64>), NetworkError> {
    check_dims(w, t)?;
    if data.is_empty() {
        return Err(NetworkError::EmptyData);
    }
    let n = data.len() as f64;
    let mut cache = ForwardCache::new(t);
    let mut deltas = delta_scratch(t);
    let mut grad = vec![0.0; t.param_count()];
    let mut sse = 0.0;
    for s in data {
        check_sample(t, &s.inputs)?;
        forward_into(&w.values, t, &s.inputs, &mut cache);
        let e = s.target - cache.output();
        sse += e * e;
        // d(e^2/N)/dy = -2e/N
        backprop_into(&w.values, t, &cache, -2.0 * e / n, &mut deltas, &mut grad);
    }
    Ok((sse / n, grad))
}

/// `J[i][k] = d e_i / d param_k` with `e_i = target_i - output_i`.
pub fn jacobian(w: &Weights, t: &Topology, data: &[Sample]) -> Result<DMatrix<f64>, NetworkError> {
    residuals_and_jacobian(w, t, data).map(|(_, j)| j)
}

pub fn residuals_and_jacobian(
    w: &Weights,
    t: &Topology,
    data: &[Sample],
) -> Result<(Vec<f64>, DMatrix<f64>), NetworkError> {
    check_dims(w, t)?;
    if data.is_empty() {
        return Err(NetworkError::EmptyData);
    }
    let p = t.param_count();
    let mut cache = ForwardCache::new(t);
    let mut deltas = delta_scratch(t);
    let mut row = vec![0.0; p];
    let mut jac = DMatrix::zeros(data.len(), p);
    let mut e = Vec::with_capacity(data.len());
    for (i, s) in data.iter().enumerate() {
        check_sample(t, &s.inputs)?;
        forward_into(&w.values, t, &s.inputs, &mut cache);
        e.push(s.target - cache.output());
        row.iter_mut().for_each(|v| *v = 0.0);
        backprop_into(&w.values, t, &cache, -1.0, &mut deltas, &mut row);
        for (k, v) in row.iter().enumerate() {
            jac[(i, k)] = *v;
        }
    }
    Ok((e, jac))
}
