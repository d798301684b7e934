//! A small CPU convolutional network engine for curve regression.
//!
//! Layers are stored in one flat parameter vector. Convolutions run as
//! im2col followed by a matrix product. The network regresses a robustness
//! curve resampled onto a fixed grid of `output_len` points; predictions are
//! clamped to `[0, 1]` while the loss sees the raw output.

mod checkpoint;
mod input;
mod layers;
mod model;
mod scalar;
mod train;

pub use self::checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, FLATTEN_ORDER};
pub use self::input::{prepare_input, resample_curve, resample_square, tensor_to_sequence};
pub use self::layers::{LayerSpec, Padding, Shape};
pub use self::model::{
    loss, AdamConfig, InputMode, LossKind, ModelConfig, NeuralModel, Preset, DEFAULT_OUTPUT_LEN,
};
pub use self::scalar::Scalar;
pub use self::train::{evaluate_loss, train, EpochLog, Sample, TrainConfig, TrainLog};

use crate::attack::RobustnessCurve;
use crate::error::Result;
use crate::graph::Graph;

/// Predicted robustness curve of a graph on the model's output grid.
pub fn predict(m: &NeuralModel<f32>, g: &Graph) -> Result<RobustnessCurve> {
    let x = prepare_input(g, &m.config)?;
    predict_input(m, &x, g.node_count())
}

/// Prediction for an already prepared input.
pub fn predict_input(m: &NeuralModel<f32>, x: &[f32], n: usize) -> Result<RobustnessCurve> {
    Ok(RobustnessCurve {
        metric: m.config.metric,
        values: m.forward(x)?.into_iter().map(f64::from).collect(),
        n,
    })
}

/// A training sample for `g` with its simulated curve as target.
pub fn make_sample(cfg: &ModelConfig, g: &Graph, curve: &[f64]) -> Result<Sample<f32>> {
    Ok(Sample {
        input: prepare_input(g, cfg)?,
        target: resample_curve(curve, cfg.output_len)?
            .into_iter()
            .map(|v| v as f32)
            .collect(),
    })
}
