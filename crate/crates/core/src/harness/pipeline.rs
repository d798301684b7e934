use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::dataset::{build_dataset, DatasetManifest, DatasetSpec, Split};
use super::experiment::{
    rank_error_table, run_experiment, train_predictor, ErrorTable, ExperimentRecord, FixedCurve,
    Predictor, RankMethod,
};
use super::plots::emit_plot_data;
use crate::attack::Metric;
use crate::error::Result;
use crate::lfr::LfrConfig;
use crate::nn::{write_checkpoint, ModelConfig, NeuralModel, TrainConfig, TrainLog};
use crate::rng::derive_seed;
use crate::spectral::Measure;
use crate::text::sig17;

/// Everything one end-to-end run needs. A single master seed fixes the
/// dataset and every network initialization.
#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub dataset: DatasetSpec,
    pub networks: Vec<ModelConfig>,
    pub train: TrainConfig,
}

impl PipelineConfig {
    /// Desk-scale run: the default dataset and one LFR-CNN with `W=100`,
    /// `g=8`, two attributes and a 100-point output grid, trained for up to
    /// 40 epochs.
    pub fn desk(seed: u64) -> PipelineConfig {
        PipelineConfig {
            dataset: DatasetSpec::desk(seed),
            networks: vec![ModelConfig::lfr_cnn_with_width(
                LfrConfig::new(100, 8),
                100,
                0,
                DESK_WIDTH,
            )],
            train: TrainConfig {
                epochs: 40,
                patience: Some(8),
                ..TrainConfig::default()
            },
        }
        .seeded()
    }

    /// Rewrites the network seeds and metrics from the dataset spec.
    pub fn seeded(mut self) -> PipelineConfig {
        for (i, cfg) in self.networks.iter_mut().enumerate() {
            cfg.seed = derive_seed(self.dataset.seed ^ 0x4E4E, i as u64);
            cfg.metric = self.dataset.metric;
        }
        self
    }
}

/// Channel scale of the desk LFR-CNN.
pub const DESK_WIDTH: f64 = 0.5;

/// Files written by [`run_pipeline`], relative to its output directory.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOutput {
    pub manifest: DatasetManifest,
    pub checkpoints: Vec<PathBuf>,
    pub tables: Vec<PathBuf>,
    pub errors: ErrorTable,
    pub records: Vec<ExperimentRecord>,
}

pub fn write_train_log<W: Write>(log: &TrainLog, mut out: W) -> Result<()> {
    writeln!(out, "epoch,train_loss,val_loss")?;
    for (i, e) in log.epochs.iter().enumerate() {
        let val = e.val_loss.map_or_else(|| "nan".into(), sig17);
        writeln!(out, "{},{},{val}", i + 1, sig17(e.train_loss))?;
    }
    Ok(())
}

/// Per-record errors without timings, so the file is reproducible.
pub fn write_records<W: Write>(records: &[ExperimentRecord], mut out: W) -> Result<()> {
    writeln!(out, "record_id,model,predictor,mean_error")?;
    for r in records {
        writeln!(out, "{},{},{},{}", r.record_id, r.model, r.predictor, sig17(r.mean_error))?;
    }
    Ok(())
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Builds the dataset under `out/dataset`, trains every network (checkpoints
/// and logs in `out/models`), evaluates them with a mean-curve baseline on
/// the test split and writes tables to `out/results` and plot data to
/// `out/plots`. Rank tables are written for undirected connectivity data.
pub fn run_pipeline(cfg: &PipelineConfig, out: &Path, workers: usize) -> Result<PipelineOutput> {
    let manifest = build_dataset(&cfg.dataset, &out.join("dataset"), workers)?;
    let models_dir = out.join("models");
    let results = out.join("results");
    fs::create_dir_all(&models_dir)?;
    fs::create_dir_all(&results)?;

    let mut networks = Vec::new();
    let mut checkpoints = Vec::new();
    for net in &cfg.networks {
        let (model, log) = train_predictor(&manifest, net.clone(), &cfg.train, workers)?;
        let ckpt = models_dir.join(format!("{}.ckpt", net.name));
        write_file(&ckpt, |w| write_checkpoint(&model, w))?;
        write_file(&models_dir.join(format!("{}.train.csv", net.name)), |w| write_train_log(&log, w))?;
        checkpoints.push(ckpt);
        networks.push(model);
    }

    let grid = cfg.networks.first().map_or(crate::nn::DEFAULT_OUTPUT_LEN, |n| n.output_len);
    let train_set = manifest.load_split(Split::Train, workers)?;
    let baseline = FixedCurve::mean_of(&train_set, grid)?;
    let test = manifest.load_split(Split::Test, workers)?;
    let mut predictors: Vec<&dyn Predictor> = networks.iter().map(|m: &NeuralModel<f32>| m as &dyn Predictor).collect();
    predictors.push(&baseline);

    let records = run_experiment(&test, &predictors, workers)?;
    let errors = ErrorTable::from_records(&records);
    let mut tables = Vec::new();
    let path = results.join("errors.csv");
    write_file(&path, |w| errors.write_csv(w))?;
    tables.push(path);
    let path = results.join("records.csv");
    write_file(&path, |w| write_records(&records, w))?;
    tables.push(path);

    if !cfg.dataset.directed && cfg.dataset.metric == Metric::Connectivity {
        let mut methods: Vec<RankMethod<'_>> = predictors.iter().map(|&p| RankMethod::Predictor(p)).collect();
        methods.extend(Measure::ALL.iter().map(|&m| RankMethod::Spectral(m)));
        let table = rank_error_table(&test, &methods, workers)?;
        let path = results.join("rank.csv");
        write_file(&path, |w| table.write_csv(w))?;
        tables.push(path);
    }
    tables.extend(emit_plot_data(&records, &out.join("plots"))?);
    Ok(PipelineOutput {
        manifest,
        checkpoints,
        tables,
        errors,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::Model;

    pub(crate) fn tiny(seed: u64) -> PipelineConfig {
        let mut dataset = DatasetSpec::desk(seed);
        dataset.models = vec![Model::Er, Model::Ba];
        dataset.n_range = (20, 26);
        dataset.train = 6;
        dataset.validation = 2;
        dataset.test = 3;
        PipelineConfig {
            dataset,
            networks: vec![ModelConfig::lfr_cnn_with_width(LfrConfig::new(12, 4), 10, 0, 0.1)],
            train: TrainConfig {
                epochs: 2,
                batch_size: 4,
                patience: None,
                workers: 1,
            },
        }
        .seeded()
    }

    #[test]
    fn writes_every_table() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_pipeline(&tiny(5), dir.path(), 2).unwrap();
        assert_eq!(out.checkpoints.len(), 1);
        let names: Vec<String> = out
            .tables
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            names,
            ["errors.csv", "records.csv", "rank.csv", "ra_conn.csv", "ra_conn_er.csv", "ra_conn_ba.csv"]
        );
        assert_eq!(out.records.len(), 2 * 3 * 2);
    }
}
