use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;

use super::layers::{Cache, Layer, LayerSpec, Shape};
use super::scalar::Scalar;
use crate::attack::Metric;
use crate::error::{Error, Result};
use crate::lfr::LfrConfig;
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LossKind {
    Squared,
    Absolute,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Squared => "squared",
            LossKind::Absolute => "absolute",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squared" | "mse" => Ok(LossKind::Squared),
            "absolute" | "mae" => Ok(LossKind::Absolute),
            _ => Err(Error::InvalidParameter(format!("unknown loss {s:?}"))),
        }
    }
}

/// Mean pointwise loss.
pub fn loss(pred: &[f64], target: &[f64], kind: LossKind) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::LengthMismatch {
            expected: target.len(),
            got: pred.len(),
        });
    }
    if pred.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = pred
        .iter()
        .zip(target)
        .map(|(p, t)| match kind {
            LossKind::Squared => (p - t) * (p - t),
            LossKind::Absolute => (p - t).abs(),
        })
        .sum();
    Ok(sum / pred.len() as f64)
}

/// Loss and its gradient with respect to `pred`.
fn loss_grad<T: Scalar>(pred: &[T], target: &[T], kind: LossKind, grad: &mut [T]) -> T {
    let n = T::of(pred.len() as f64);
    let mut sum = T::zero();
    for ((g, &p), &t) in grad.iter_mut().zip(pred).zip(target) {
        let d = p - t;
        match kind {
            LossKind::Squared => {
                sum = sum + d * d;
                *g = T::of(2.0) * d / n;
            }
            LossKind::Absolute => {
                sum = sum + d.abs();
                *g = if d > T::zero() {
                    T::one() / n
                } else if d < T::zero() {
                    -T::one() / n
                } else {
                    T::zero()
                };
            }
        }
    }
    sum / n
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// How a graph becomes the network input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InputMode {
    /// Receptive-field tensor reshaped into a square single-channel image.
    LfrSquare,
    /// Receptive-field tensor as an `h`-channel sequence of length `W g`.
    LfrSequence,
    /// Adjacency matrix resampled to the input side.
    Adjacency,
    /// Caller-supplied tensors.
    Raw,
}

impl InputMode {
    pub fn name(self) -> &'static str {
        match self {
            InputMode::LfrSquare => "lfr-square",
            InputMode::LfrSequence => "lfr-sequence",
            InputMode::Adjacency => "adjacency",
            InputMode::Raw => "raw",
        }
    }
}

impl FromStr for InputMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lfr-square" => Ok(InputMode::LfrSquare),
            "lfr-sequence" => Ok(InputMode::LfrSequence),
            "adjacency" => Ok(InputMode::Adjacency),
            "raw" => Ok(InputMode::Raw),
            _ => Err(Error::Format(format!("unknown input mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    LfrCnn,
    Pcr,
    Patchy1d,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::LfrCnn, Preset::Pcr, Preset::Patchy1d];

    pub fn name(self) -> &'static str {
        match self {
            Preset::LfrCnn => "lfr-cnn",
            Preset::Pcr => "pcr",
            Preset::Patchy1d => "patchy1d",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lfr-cnn" => Ok(Preset::LfrCnn),
            "pcr" => Ok(Preset::Pcr),
            "patchy1d" | "patchy-san" => Ok(Preset::Patchy1d),
            _ => Err(Error::InvalidParameter(format!("unknown preset {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    /// Preset name, or `custom`.
    pub name: String,
    pub input_mode: InputMode,
    pub input: Shape,
    pub layers: Vec<LayerSpec>,
    pub output_len: usize,
    pub metric: Metric,
    pub lfr: LfrConfig,
    pub loss: LossKind,
    pub adam: AdamConfig,
    pub seed: u64,
}

pub const DEFAULT_OUTPUT_LEN: usize = 100;

impl ModelConfig {
    pub fn custom(input: Shape, layers: Vec<LayerSpec>, output_len: usize, seed: u64) -> Self {
        ModelConfig {
            name: "custom".into(),
            input_mode: InputMode::Raw,
            input,
            layers,
            output_len,
            metric: Metric::Connectivity,
            lfr: LfrConfig::default(),
            loss: LossKind::Squared,
            adam: AdamConfig::default(),
            seed,
        }
    }

    /// Three conv/ReLU/pool groups (7x7x64, 5x5x64, 3x3x128) and two dense
    /// layers on the square-reshaped receptive-field tensor.
    pub fn lfr_cnn(lfr: LfrConfig, output_len: usize, seed: u64) -> Self {
        Self::lfr_cnn_with_width(lfr, output_len, seed, 1.0)
    }

    /// [`ModelConfig::lfr_cnn`] with every channel and hidden width scaled by
    /// `width`.
    pub fn lfr_cnn_with_width(lfr: LfrConfig, output_len: usize, seed: u64, width: f64) -> Self {
        let ch = |c: usize| ((c as f64 * width).round() as usize).max(1);
        let side = lfr.square_side();
        let mut layers = Vec::new();
        for (c, k) in [(64, 7), (64, 5), (128, 3)] {
            layers.extend([LayerSpec::conv2d(ch(c), k), LayerSpec::Relu, LayerSpec::max2()]);
        }
        layers.extend([
            LayerSpec::Flatten,
            LayerSpec::dense(ch(256)),
            LayerSpec::Relu,
            LayerSpec::dense(output_len),
        ]);
        ModelConfig {
            name: Preset::LfrCnn.name().into(),
            input_mode: InputMode::LfrSquare,
            input: Shape::new(1, side, side),
            lfr,
            ..Self::custom(Shape::new(1, side, side), layers, output_len, seed)
        }
    }

    /// VGG-style baseline on the raw adjacency image: seven 3x3 conv/pool
    /// groups from an input side of 700 up, six below.
    pub fn pcr(input_side: usize, output_len: usize, seed: u64) -> Self {
        let groups = if input_side >= 700 { 7 } else { 6 };
        let mut layers = Vec::new();
        for c in [64, 64, 128, 128, 256, 256, 512].into_iter().take(groups) {
            layers.extend([LayerSpec::conv2d(c, 3), LayerSpec::Relu, LayerSpec::max2()]);
        }
        layers.extend([
            LayerSpec::Flatten,
            LayerSpec::dense(640),
            LayerSpec::Relu,
            LayerSpec::dense(output_len),
        ]);
        let input = Shape::new(1, input_side, input_side);
        ModelConfig {
            name: Preset::Pcr.name().into(),
            input_mode: InputMode::Adjacency,
            ..Self::custom(input, layers, output_len, seed)
        }
    }

    /// One-dimensional network over the receptive-field sequence: a conv
    /// with kernel and stride `g` reads one field per step.
    pub fn patchy1d(lfr: LfrConfig, output_len: usize, seed: u64) -> Self {
        let layers = vec![
            LayerSpec::conv1d(16, lfr.g, lfr.g),
            LayerSpec::Relu,
            LayerSpec::conv1d(8, 10.min(lfr.w), 1),
            LayerSpec::Relu,
            LayerSpec::Flatten,
            LayerSpec::dense(128),
            LayerSpec::Relu,
            LayerSpec::dense(output_len),
        ];
        let input = Shape::new(lfr.h(), 1, lfr.w * lfr.g);
        ModelConfig {
            name: Preset::Patchy1d.name().into(),
            input_mode: InputMode::LfrSequence,
            lfr,
            ..Self::custom(input, layers, output_len, seed)
        }
    }

    pub fn preset(preset: Preset, lfr: LfrConfig, pcr_side: usize, output_len: usize, seed: u64) -> Self {
        match preset {
            Preset::LfrCnn => Self::lfr_cnn(lfr, output_len, seed),
            Preset::Pcr => Self::pcr(pcr_side, output_len, seed),
            Preset::Patchy1d => Self::patchy1d(lfr, output_len, seed),
        }
    }
}

/// A feed-forward network with a flat parameter vector and Adam state.
#[derive(Clone, Debug)]
pub struct NeuralModel<T: Scalar = f32> {
    pub config: ModelConfig,
    pub(crate) layers: Vec<Layer>,
    pub(crate) params: Vec<T>,
    adam_m: Vec<T>,
    adam_v: Vec<T>,
    pub step_count: u64,
}

/// Activations of one forward pass.
#[derive(Clone, Debug, Default)]
pub(crate) struct Trace<T> {
    acts: Vec<Vec<T>>,
    caches: Vec<Cache<T>>,
}

impl<T: Scalar> NeuralModel<T> {
    pub fn build(config: ModelConfig) -> Result<Self> {
        if config.output_len < 2 {
            return Err(Error::InvalidParameter("output length must be at least 2".into()));
        }
        let mut layers = Vec::with_capacity(config.layers.len());
        let mut shape = config.input;
        let mut offset = 0;
        for &spec in &config.layers {
            let layer = Layer::resolve(spec, shape, offset)?;
            shape = layer.output;
            offset += layer.param_len();
            layers.push(layer);
        }
        if shape != Shape::new(config.output_len, 1, 1) {
            return Err(Error::Shape(format!(
                "network ends in {shape}, expected {} outputs",
                config.output_len
            )));
        }
        let mut params = vec![T::zero(); offset];
        for (i, l) in layers.iter().enumerate() {
            if l.weights == 0 {
                continue;
            }
            let bound = (1.0 / l.fan_in() as f64).sqrt();
            let mut rng = rng_from_seed(derive_seed(config.seed, i as u64));
            for p in &mut params[l.offset..l.offset + l.weights] {
                *p = T::of(rng.gen_range(-bound..bound));
            }
        }
        Ok(NeuralModel {
            config,
            layers,
            adam_m: vec![T::zero(); offset],
            adam_v: vec![T::zero(); offset],
            params,
            step_count: 0,
        })
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    /// Output shape of every layer.
    pub fn layer_shapes(&self) -> Vec<Shape> {
        self.layers.iter().map(|l| l.output).collect()
    }

    fn check_input(&self, x: &[T]) -> Result<()> {
        if x.len() != self.config.input.len() {
            return Err(Error::Shape(format!(
                "input has {} values, model expects {}",
                x.len(),
                self.config.input
            )));
        }
        Ok(())
    }

    pub(crate) fn forward_trace(&self, x: &[T], trace: &mut Trace<T>) {
        let n = self.layers.len();
        trace.acts.resize_with(n + 1, Vec::new);
        trace.caches.resize_with(n, Cache::default);
        trace.acts[0].clear();
        trace.acts[0].extend_from_slice(x);
        for (i, l) in self.layers.iter().enumerate() {
            let (done, rest) = trace.acts.split_at_mut(i + 1);
            l.forward(&self.params, &done[i], &mut rest[0], &mut trace.caches[i]);
        }
    }

    /// Output before clamping.
    pub fn forward_raw(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_input(x)?;
        let mut trace = Trace::default();
        self.forward_trace(x, &mut trace);
        Ok(trace.acts.pop().unwrap())
    }

    /// Prediction clamped to `[0, 1]`.
    pub fn forward(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(self
            .forward_raw(x)?
            .into_iter()
            .map(|v| v.max(T::zero()).min(T::one()))
            .collect())
    }

    /// Backpropagates from the output gradient; parameter gradients are
    /// added to `grad`. Returns the input gradient when asked.
    fn backward_trace(&self, trace: &Trace<T>, dout: &[T], grad: &mut [T], want_dx: bool) -> Option<Vec<T>> {
        let mut dy = dout.to_vec();
        let mut dx = Vec::new();
        for (i, l) in self.layers.iter().enumerate().rev() {
            let need = want_dx || i > 0;
            let g = &mut grad[l.offset..l.offset + l.param_len()];
            l.backward(
                &self.params,
                &trace.acts[i],
                &trace.acts[i + 1],
                &dy,
                &trace.caches[i],
                g,
                need.then_some(&mut dx),
            );
            std::mem::swap(&mut dy, &mut dx);
        }
        want_dx.then_some(dy)
    }

    /// Loss of one sample and its gradients with respect to the parameters
    /// (added into `grad`) and the input.
    pub fn sample_gradient(&self, x: &[T], target: &[T], grad: &mut [T]) -> Result<(T, Vec<T>)> {
        self.check_input(x)?;
        if target.len() != self.config.output_len {
            return Err(Error::LengthMismatch {
                expected: self.config.output_len,
                got: target.len(),
            });
        }
        let mut trace = Trace::default();
        self.forward_trace(x, &mut trace);
        let out = trace.acts.last().unwrap();
        let mut dout = vec![T::zero(); out.len()];
        let l = loss_grad(out, target, self.config.loss, &mut dout);
        let dx = self.backward_trace(&trace, &dout, grad, true).unwrap();
        Ok((l, dx))
    }

    /// Mean loss and mean parameter gradient over a batch. Per-sample
    /// gradients are summed in batch order whatever the worker count, so
    /// the result does not depend on it.
    pub fn batch_gradient(&self, batch: &[(&[T], &[T])], workers: usize) -> Result<(T, Vec<T>)> {
        if batch.is_empty() {
            return Err(Error::InvalidParameter("empty batch".into()));
        }
        let p = self.params.len();
        let mut total = vec![T::zero(); p];
        let mut loss_sum = T::zero();
        let one = |&(x, t): &(&[T], &[T])| -> Result<(T, Vec<T>)> {
            self.check_input(x)?;
            let mut g = vec![T::zero(); p];
            let mut trace = Trace::default();
            self.forward_trace(x, &mut trace);
            let out = trace.acts.last().unwrap();
            if t.len() != out.len() {
                return Err(Error::LengthMismatch {
                    expected: out.len(),
                    got: t.len(),
                });
            }
            let mut dout = vec![T::zero(); out.len()];
            let l = loss_grad(out, t, self.config.loss, &mut dout);
            self.backward_trace(&trace, &dout, &mut g, false);
            Ok((l, g))
        };
        for chunk in batch.chunks(workers.max(1)) {
            let parts: Vec<Result<(T, Vec<T>)>> = if workers > 1 {
                chunk.par_iter().map(one).collect()
            } else {
                chunk.iter().map(one).collect()
            };
            for part in parts {
                let (l, g) = part?;
                loss_sum = loss_sum + l;
                for (a, b) in total.iter_mut().zip(g) {
                    *a = *a + b;
                }
            }
        }
        let n = T::of(batch.len() as f64);
        total.iter_mut().for_each(|g| *g = *g / n);
        Ok((loss_sum / n, total))
    }

    /// One Adam update.
    pub fn apply_gradient(&mut self, grad: &[T]) {
        let a = self.config.adam;
        self.step_count += 1;
        let t = self.step_count as i32;
        let (b1, b2) = (T::of(a.beta1), T::of(a.beta2));
        let c1 = T::of(1.0 - a.beta1.powi(t));
        let c2 = T::of(1.0 - a.beta2.powi(t));
        let (lr, eps) = (T::of(a.lr), T::of(a.eps));
        for i in 0..self.params.len() {
            let g = grad[i];
            let m = b1 * self.adam_m[i] + (T::one() - b1) * g;
            let v = b2 * self.adam_v[i] + (T::one() - b2) * g * g;
            self.adam_m[i] = m;
            self.adam_v[i] = v;
            let mhat = m / c1;
            let vhat = v / c2;
            self.params[i] = self.params[i] - lr * mhat / (vhat.sqrt() + eps);
        }
    }

    /// Gradient step on a batch. Returns the batch loss before the update.
    pub fn train_step(&mut self, batch: &[(&[T], &[T])], workers: usize) -> Result<T> {
        let (l, g) = self.batch_gradient(batch, workers)?;
        if !l.is_finite() {
            return Err(Error::Diverged(self.step_count));
        }
        self.apply_gradient(&g);
        Ok(l)
    }

    pub(crate) fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub(crate) fn from_parts(config: ModelConfig, params: Vec<T>, step_count: u64) -> Result<Self> {
        let mut m = Self::build(config)?;
        if params.len() != m.params.len() {
            return Err(Error::LengthMismatch {
                expected: m.params.len(),
                got: params.len(),
            });
        }
        m.params = params;
        m.step_count = step_count;
        Ok(m)
    }
}
