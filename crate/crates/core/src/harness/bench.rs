use std::io::Write;
use std::time::Instant;

use super::stats::median;
use crate::attack::{robustness_curve, AttackStrategy, Metric};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::nn::{prepare_input, InputMode, NeuralModel};
use crate::text::sig17;

/// Median wall-clock seconds of one pipeline stage.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub stage: String,
    pub median_seconds: f64,
    pub runs: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn get(&self, stage: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.stage == stage).map(|r| r.median_seconds)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "stage,median_seconds,runs")?;
        for r in &self.rows {
            writeln!(out, "{},{},{}", r.stage, sig17(r.median_seconds), r.runs)?;
        }
        Ok(())
    }

    fn push(&mut self, stage: String, times: &[f64]) {
        self.rows.push(BenchRow {
            stage,
            median_seconds: median(times),
            runs: times.len(),
        });
    }
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, f64) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed().as_secs_f64().max(1e-9))
}

/// Times attack simulation for both metrics and, for every model, input
/// preparation and inference separately. Run `k` uses graph `k % len`.
///
/// Stages are `sim-conn`, `sim-ctrl`, then per model `<name>/input`,
/// `<name>/cnn` and `<name>/total`, where total is the per-run sum. For
/// LFR-fed models the input stage is the LFR encoding.
pub fn bench(
    graphs: &[Graph],
    models: &[&NeuralModel<f32>],
    strategy: AttackStrategy,
    runs: usize,
) -> Result<BenchReport> {
    if graphs.is_empty() || runs == 0 {
        return Err(Error::InvalidParameter("bench needs graphs and at least one run".into()));
    }
    let mut report = BenchReport::default();
    for metric in [Metric::Connectivity, Metric::Controllability] {
        let times: Vec<f64> = (0..runs)
            .map(|k| timed(|| robustness_curve(&graphs[k % graphs.len()], strategy, metric)).1)
            .collect();
        report.push(format!("sim-{}", metric.name()), &times);
    }
    for m in models {
        let mut input = Vec::with_capacity(runs);
        let mut infer = Vec::with_capacity(runs);
        for k in 0..runs {
            let g = &graphs[k % graphs.len()];
            let (x, t_in) = timed(|| prepare_input(g, &m.config));
            let x = x?;
            let (y, t_nn) = timed(|| m.forward(&x));
            y?;
            input.push(t_in);
            infer.push(t_nn);
        }
        let total: Vec<f64> = input.iter().zip(&infer).map(|(a, b)| a + b).collect();
        let name = &m.config.name;
        let input_stage = match m.config.input_mode {
            InputMode::LfrSquare | InputMode::LfrSequence => "lfr",
            InputMode::Adjacency | InputMode::Raw => "input",
        };
        report.push(format!("{name}/{input_stage}"), &input);
        report.push(format!("{name}/cnn"), &infer);
        report.push(format!("{name}/total"), &total);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfr::LfrConfig;
    use crate::netgen::{generate, GenSpec, Model};
    use crate::nn::ModelConfig;

    #[test]
    fn rows_positive_and_named() {
        let g = generate(&GenSpec::new(Model::Er, 30, 60, false, 3)).unwrap();
        let m = NeuralModel::build(ModelConfig::lfr_cnn_with_width(LfrConfig::new(10, 4), 10, 1, 0.1))
            .unwrap();
        let r = bench(&[g], &[&m], AttackStrategy::random(1), 3).unwrap();
        let stages: Vec<&str> = r.rows.iter().map(|r| r.stage.as_str()).collect();
        assert_eq!(
            stages,
            ["sim-conn", "sim-ctrl", "lfr-cnn/lfr", "lfr-cnn/cnn", "lfr-cnn/total"]
        );
        assert!(r.rows.iter().all(|r| r.median_seconds > 0.0 && r.runs == 3));
    }
}
