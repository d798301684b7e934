use rand::seq::SliceRandom;

use super::model::NeuralModel;
use super::scalar::Scalar;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// One training example: a prepared input and a target on the output grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T = f32> {
    pub input: Vec<T>,
    pub target: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// Stop after this many epochs without a validation improvement.
    pub patience: Option<usize>,
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            batch_size: 16,
            patience: Some(5),
            workers: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochLog {
    pub train_loss: f64,
    pub val_loss: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainLog {
    pub epochs: Vec<EpochLog>,
    /// Epoch whose weights were kept (the best on validation, else the last).
    pub best_epoch: usize,
}

impl TrainLog {
    /// Running minimum of the per-epoch training loss.
    pub fn running_min(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.epochs
            .iter()
            .map(|e| {
                best = best.min(e.train_loss);
                best
            })
            .collect()
    }
}

/// Mean loss over a set, without updating the model.
pub fn evaluate_loss<T: Scalar>(m: &NeuralModel<T>, set: &[Sample<T>]) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::InvalidParameter("empty evaluation set".into()));
    }
    let mut sum = 0.0;
    for s in set {
        let out = m.forward_raw(&s.input)?;
        let p: Vec<f64> = out.iter().map(|v| v.to_f64().unwrap()).collect();
        let t: Vec<f64> = s.target.iter().map(|v| v.to_f64().unwrap()).collect();
        sum += super::model::loss(&p, &t, m.config.loss)?;
    }
    Ok(sum / set.len() as f64)
}

/// Mini-batch Adam with a per-epoch shuffle drawn from the model seed. With
/// a validation set and a patience, training stops once validation loss
/// has not improved for that many epochs and the best weights are restored.
pub fn train<T: Scalar>(
    m: &mut NeuralModel<T>,
    train_set: &[Sample<T>],
    val_set: &[Sample<T>],
    cfg: &TrainConfig,
) -> Result<TrainLog> {
    if train_set.is_empty() {
        return Err(Error::InvalidParameter("empty training set".into()));
    }
    let batch_size = cfg.batch_size.max(1);
    let mut log = TrainLog::default();
    let mut best: Option<(f64, Vec<T>)> = None;
    let mut since_best = 0;
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 0..cfg.epochs {
        let mut rng = rng_from_seed(derive_seed(m.config.seed ^ 0x7EA1, epoch as u64));
        order.sort_unstable();
        order.shuffle(&mut rng);
        let mut sum = 0.0;
        for chunk in order.chunks(batch_size) {
            let batch: Vec<(&[T], &[T])> = chunk
                .iter()
                .map(|&i| (&train_set[i].input[..], &train_set[i].target[..]))
                .collect();
            let l = m.train_step(&batch, cfg.workers)?;
            sum += l.to_f64().unwrap() * chunk.len() as f64;
        }
        let train_loss = sum / train_set.len() as f64;
        let val_loss = if val_set.is_empty() {
            None
        } else {
            Some(evaluate_loss(m, val_set)?)
        };
        log.epochs.push(EpochLog {
            train_loss,
            val_loss,
        });
        let Some(v) = val_loss else {
            log.best_epoch = epoch;
            continue;
        };
        if best.as_ref().map_or(true, |b| v < b.0) {
            best = Some((v, m.params().to_vec()));
            log.best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if cfg.patience.is_some_and(|p| since_best >= p) {
                break;
            }
        }
    }
    if let Some((_, params)) = best {
        m.params_mut().copy_from_slice(&params);
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{LayerSpec, ModelConfig, Shape};

    fn model(seed: u64) -> NeuralModel<f32> {
        let cfg = ModelConfig::custom(
            Shape::new(1, 6, 6),
            vec![
                LayerSpec::conv2d(4, 3),
                LayerSpec::Relu,
                LayerSpec::max2(),
                LayerSpec::Flatten,
                LayerSpec::dense(16),
                LayerSpec::Relu,
                LayerSpec::dense(5),
            ],
            5,
            seed,
        );
        NeuralModel::build(cfg).unwrap()
    }

    fn sample(k: usize) -> Sample<f32> {
        Sample {
            input: (0..36).map(|i| ((i * (k + 3)) % 7) as f32 / 7.0).collect(),
            target: (0..5).map(|i| 1.0 - i as f32 * 0.1 * (k % 3) as f32).collect(),
        }
    }

    #[test]
    fn memorizes_one_sample() {
        let mut m = model(1);
        let cfg = TrainConfig {
            epochs: 200,
            batch_size: 1,
            patience: None,
            workers: 1,
        };
        let log = train(&mut m, &[sample(0)], &[], &cfg).unwrap();
        assert_eq!(log.epochs.len(), 200);
        assert!(evaluate_loss(&m, &[sample(0)]).unwrap() <= 1e-3);
        let mins = log.running_min();
        assert!(mins.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn deterministic_and_early_stopping() {
        let data: Vec<Sample<f32>> = (0..12).map(sample).collect();
        let cfg = TrainConfig {
            epochs: 40,
            batch_size: 4,
            patience: Some(3),
            workers: 1,
        };
        let mut a = model(2);
        let la = train(&mut a, &data[..9], &data[9..], &cfg).unwrap();
        let mut b = model(2);
        let lb = train(&mut b, &data[..9], &data[9..], &cfg).unwrap();
        assert_eq!(a.params(), b.params());
        assert_eq!(la, lb);
        let best = la.epochs[la.best_epoch].val_loss.unwrap();
        assert!(la.epochs.iter().all(|e| e.val_loss.unwrap() >= best));
        assert!(train(&mut a, &[], &[], &cfg).is_err());
    }
}
