use proptest::prelude::*;

use robnet::lfr::LfrConfig;
use robnet::nn::{
    loss, read_checkpoint, resample_curve, train, write_checkpoint, LayerSpec, LossKind,
    ModelConfig, NeuralModel, Sample, Shape, TrainConfig,
};

fn small_config(seed: u64, channels: usize, side: usize) -> ModelConfig {
    ModelConfig::custom(
        Shape::new(channels, side, side),
        vec![LayerSpec::conv2d(3, 3), LayerSpec::max2(), LayerSpec::Flatten, LayerSpec::dense(6), LayerSpec::dense(5)],
        5,
        seed,
    )
}

fn input_for(cfg: &ModelConfig, salt: u64) -> Vec<f32> {
    let len = cfg.input.len();
    (0..len).map(|i| (((i as u64 * 2654435761 + salt) % 1000) as f32) / 1000.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn forward_is_bitwise_deterministic(seed in any::<u64>(), channels in 1..3usize, side in 4..9usize, salt in any::<u64>()) {
        let cfg = small_config(seed, channels, side);
        let x = input_for(&cfg, salt);
        let a = NeuralModel::<f32>::build(cfg.clone()).unwrap();
        let b = NeuralModel::<f32>::build(cfg).unwrap();
        let (ya, yb) = (a.forward(&x).unwrap(), b.forward(&x).unwrap());
        prop_assert_eq!(ya.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), yb.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        prop_assert_eq!(ya.len(), 5);
        prop_assert!(ya.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn checkpoints_preserve_predictions(seed in any::<u64>(), salt in any::<u64>()) {
        let cfg = ModelConfig::lfr_cnn_with_width(LfrConfig::new(8, 3), 6, seed, 0.1);
        let x = input_for(&cfg, salt);
        let m = NeuralModel::<f32>::build(cfg).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&m, &mut buf).unwrap();
        let back = read_checkpoint(&buf[..]).unwrap();
        prop_assert_eq!(m.forward(&x).unwrap(), back.forward(&x).unwrap());
    }

    #[test]
    fn resampling_keeps_ends_and_range(values in proptest::collection::vec(0.0..1.0f64, 2..60), len in 2..120usize) {
        let r = resample_curve(&values, len).unwrap();
        let (lo, hi) = values.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        prop_assert_eq!(r.len(), len);
        prop_assert!((r[0] - values[0]).abs() < 1e-12);
        prop_assert!((r[len - 1] - values[values.len() - 1]).abs() < 1e-12);
        prop_assert!(r.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
    }

    #[test]
    fn losses_are_nonnegative_and_vanish_on_equality(
        pairs in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..50)
    ) {
        let (p, t): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        for kind in [LossKind::Squared, LossKind::Absolute] {
            prop_assert!(loss(&p, &t, kind).unwrap() >= 0.0);
            prop_assert_eq!(loss(&t, &t, kind).unwrap(), 0.0);
        }
    }
}

#[test]
fn training_is_reproducible() {
    let cfg = small_config(9, 1, 6);
    let samples: Vec<Sample<f32>> = (0..12)
        .map(|i| Sample {
            input: input_for(&cfg, i),
            target: (0..5).map(|j| ((i + j) % 5) as f32 / 5.0).collect(),
        })
        .collect();
    let run = || {
        let mut m = NeuralModel::<f32>::build(cfg.clone()).unwrap();
        let tc = TrainConfig {
            epochs: 4,
            batch_size: 4,
            patience: None,
            workers: 1,
        };
        let log = train(&mut m, &samples, &samples[..3], &tc).unwrap();
        (m.params().to_vec(), log)
    };
    let (pa, la) = run();
    let (pb, lb) = run();
    assert_eq!(pa, pb);
    assert_eq!(la, lb);
    assert!(la.epochs.last().unwrap().train_loss < la.epochs[0].train_loss);
}
