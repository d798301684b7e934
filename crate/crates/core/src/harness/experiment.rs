use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use super::dataset::{with_workers, DatasetManifest, Instance, Split};
use super::stats::kruskal_wallis;
use crate::attack::{prediction_error, AttackKind, Metric};
use crate::error::{Error, Result};
use crate::netgen::Model;
use crate::nn::{
    make_sample, predict_input, prepare_input, resample_curve, train, ModelConfig, NeuralModel,
    Sample, TrainConfig, TrainLog,
};
use crate::spectral::{robustness_rank, spectral_measures, Direction, Measure};
use crate::text::sig17;

/// Anything that maps a loaded instance to a curve on a fixed grid.
pub trait Predictor: Sync {
    fn name(&self) -> String;
    fn grid_len(&self) -> usize;
    fn predict(&self, inst: &Instance) -> Result<Vec<f64>>;
}

impl Predictor for NeuralModel<f32> {
    fn name(&self) -> String {
        self.config.name.clone()
    }

    fn grid_len(&self) -> usize {
        self.config.output_len
    }

    fn predict(&self, inst: &Instance) -> Result<Vec<f64>> {
        let x = prepare_input(&inst.graph, &self.config)?;
        Ok(predict_input(self, &x, inst.graph.node_count())?.values)
    }
}

/// The simulated curve itself.
pub struct Simulation {
    pub grid_len: usize,
}

impl Predictor for Simulation {
    fn name(&self) -> String {
        "sim".into()
    }

    fn grid_len(&self) -> usize {
        self.grid_len
    }

    fn predict(&self, inst: &Instance) -> Result<Vec<f64>> {
        resample_curve(&inst.curve.values, self.grid_len)
    }
}

/// A fixed curve for every input, e.g. the mean training curve.
pub struct FixedCurve {
    pub name: String,
    pub curve: Vec<f64>,
}

impl FixedCurve {
    pub fn constant(value: f64, len: usize) -> FixedCurve {
        FixedCurve {
            name: format!("const-{value}"),
            curve: vec![value; len],
        }
    }

    /// Pointwise average of the split's curves on a `len`-point grid.
    pub fn mean_of(instances: &[Instance], len: usize) -> Result<FixedCurve> {
        if instances.is_empty() {
            return Err(Error::InvalidParameter("no curves to average".into()));
        }
        let mut sum = vec![0.0; len];
        for inst in instances {
            for (s, v) in sum.iter_mut().zip(resample_curve(&inst.curve.values, len)?) {
                *s += v;
            }
        }
        Ok(FixedCurve {
            name: "mean-curve".into(),
            curve: sum.into_iter().map(|s| s / instances.len() as f64).collect(),
        })
    }
}

impl Predictor for FixedCurve {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn grid_len(&self) -> usize {
        self.curve.len()
    }

    fn predict(&self, _: &Instance) -> Result<Vec<f64>> {
        Ok(self.curve.clone())
    }
}

/// One predictor on one test record.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub record_id: String,
    pub model: Model,
    pub attack: AttackKind,
    pub metric: Metric,
    pub predictor: String,
    pub mean_error: f64,
    pub pointwise: Vec<f64>,
    /// Simulated and predicted curves on the predictor's grid.
    pub truth: Vec<f64>,
    pub prediction: Vec<f64>,
    pub seconds: f64,
}

/// Runs every predictor on every instance. Output order is instance-major,
/// then predictor order.
pub fn run_experiment(
    instances: &[Instance],
    predictors: &[&dyn Predictor],
    workers: usize,
) -> Result<Vec<ExperimentRecord>> {
    let one = |inst: &Instance| -> Result<Vec<ExperimentRecord>> {
        predictors
            .iter()
            .map(|p| {
                let start = Instant::now();
                let prediction = p.predict(inst)?;
                let seconds = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
                let truth = resample_curve(&inst.curve.values, p.grid_len())?;
                let err = prediction_error(&truth, &prediction)?;
                Ok(ExperimentRecord {
                    record_id: inst.record.id.clone(),
                    model: inst.record.model,
                    attack: inst.record.attack,
                    metric: inst.record.metric,
                    predictor: p.name(),
                    mean_error: err.mean,
                    pointwise: err.pointwise,
                    truth,
                    prediction,
                    seconds,
                })
            })
            .collect()
    };
    let nested: Vec<Result<Vec<ExperimentRecord>>> =
        with_workers(workers, || instances.par_iter().map(one).collect())?;
    let mut out = Vec::new();
    for r in nested {
        out.extend(r?);
    }
    Ok(out)
}

/// Builds training samples from loaded instances, in order.
pub fn samples_for(cfg: &ModelConfig, instances: &[Instance], workers: usize) -> Result<Vec<Sample<f32>>> {
    with_workers(workers, || {
        instances
            .par_iter()
            .map(|i| make_sample(cfg, &i.graph, &i.curve.values))
            .collect()
    })?
}

/// Trains a network on the manifest's training split, early-stopping on the
/// validation split.
pub fn train_predictor(
    manifest: &DatasetManifest,
    cfg: ModelConfig,
    train_cfg: &TrainConfig,
    workers: usize,
) -> Result<(NeuralModel<f32>, TrainLog)> {
    let train_set = samples_for(&cfg, &manifest.load_split(Split::Train, workers)?, workers)?;
    let val_set = samples_for(&cfg, &manifest.load_split(Split::Validation, workers)?, workers)?;
    let mut model = NeuralModel::build(cfg)?;
    let log = train(&mut model, &train_set, &val_set, train_cfg)?;
    Ok((model, log))
}

/// Mean prediction error per network model and predictor, with a
/// Kruskal–Wallis test across predictors on the per-record errors.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorTable {
    pub predictors: Vec<String>,
    pub rows: Vec<ErrorRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRow {
    /// Network model name, or `overall`.
    pub label: String,
    pub errors: Vec<f64>,
    pub kw_h: Option<f64>,
    pub kw_significant: Option<bool>,
}

impl ErrorTable {
    pub fn from_records(records: &[ExperimentRecord]) -> ErrorTable {
        let mut predictors: Vec<String> = Vec::new();
        for r in records {
            if !predictors.contains(&r.predictor) {
                predictors.push(r.predictor.clone());
            }
        }
        let mut by_model: BTreeMap<Model, Vec<&ExperimentRecord>> = BTreeMap::new();
        for r in records {
            by_model.entry(r.model).or_default().push(r);
        }
        let row = |label: String, recs: &[&ExperimentRecord]| {
            let groups: Vec<Vec<f64>> = predictors
                .iter()
                .map(|p| {
                    recs.iter()
                        .filter(|r| &r.predictor == p)
                        .map(|r| r.mean_error)
                        .collect()
                })
                .collect();
            let errors = groups
                .iter()
                .map(|g| g.iter().sum::<f64>() / g.len().max(1) as f64)
                .collect();
            let kw = kruskal_wallis(&groups).ok();
            ErrorRow {
                label,
                errors,
                kw_h: kw.map(|k| k.h),
                kw_significant: kw.map(|k| k.significant),
            }
        };
        let mut rows: Vec<ErrorRow> = by_model
            .iter()
            .map(|(m, recs)| row(m.name().to_string(), recs))
            .collect();
        let all: Vec<&ExperimentRecord> = records.iter().collect();
        rows.push(row("overall".into(), &all));
        ErrorTable { predictors, rows }
    }

    pub fn get(&self, label: &str, predictor: &str) -> Option<f64> {
        let col = self.predictors.iter().position(|p| p == predictor)?;
        self.rows.iter().find(|r| r.label == label).map(|r| r.errors[col])
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "model,{},kw_h,kw_significant", self.predictors.join(","))?;
        for r in &self.rows {
            let cells: Vec<String> = r.errors.iter().map(|&e| sig17(e)).collect();
            writeln!(
                out,
                "{},{},{},{}",
                r.label,
                cells.join(","),
                r.kw_h.map_or_else(|| "nan".into(), sig17),
                r.kw_significant.map_or("na", |s| if s { "yes" } else { "no" })
            )?;
        }
        Ok(())
    }
}

/// Scalar robustness used for ranking: the mean of a curve.
pub fn curve_scalar(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len().max(1) as f64
}

/// Something that ranks networks by a scalar.
pub enum RankMethod<'a> {
    Predictor(&'a dyn Predictor),
    Spectral(Measure),
}

impl RankMethod<'_> {
    pub fn name(&self) -> String {
        match self {
            RankMethod::Predictor(p) => p.name(),
            RankMethod::Spectral(m) => m.name().to_uppercase(),
        }
    }

    fn scalar(&self, inst: &Instance) -> Result<Option<f64>> {
        match self {
            RankMethod::Predictor(p) => Ok(Some(curve_scalar(&p.predict(inst)?))),
            RankMethod::Spectral(m) => {
                let g = inst.graph.to_undirected();
                Ok(spectral_measures(&g)?.get(*m))
            }
        }
    }

    fn direction(&self) -> Direction {
        match self {
            RankMethod::Predictor(_) => Direction::HigherBetter,
            RankMethod::Spectral(m) => m.direction(),
        }
    }
}

/// Mean rank error per (network model, method). Within each network model
/// the instances are ranked by simulated robustness and by each method.
#[derive(Clone, Debug, PartialEq)]
pub struct RankTable {
    pub methods: Vec<String>,
    /// `(model, mean rank error per method, count of undefined values)`.
    pub rows: Vec<(String, Vec<f64>, usize)>,
}

pub fn rank_error_table(instances: &[Instance], methods: &[RankMethod<'_>], workers: usize) -> Result<RankTable> {
    let mut by_model: BTreeMap<Model, Vec<&Instance>> = BTreeMap::new();
    for i in instances {
        by_model.entry(i.record.model).or_default().push(i);
    }
    let mut rows = Vec::new();
    let mut overall = vec![0.0; methods.len()];
    let mut overall_undefined = 0;
    for (model, group) in &by_model {
        let truth: Vec<Option<f64>> = group.iter().map(|i| Some(curve_scalar(&i.curve.values))).collect();
        let true_rank = robustness_rank(&truth, Direction::HigherBetter);
        let mut errs = Vec::with_capacity(methods.len());
        let mut undefined = 0;
        for m in methods {
            let vals: Vec<Result<Option<f64>>> =
                with_workers(workers, || group.par_iter().map(|i| m.scalar(i)).collect())?;
            let vals: Vec<Option<f64>> = vals.into_iter().collect::<Result<_>>()?;
            undefined += vals.iter().filter(|v| v.is_none()).count();
            let rank = robustness_rank(&vals, m.direction());
            let (_, mean) = crate::spectral::rank_error(&rank, &true_rank)?;
            errs.push(mean);
        }
        for (o, e) in overall.iter_mut().zip(&errs) {
            *o += e / by_model.len() as f64;
        }
        overall_undefined += undefined;
        rows.push((model.name().to_string(), errs, undefined));
    }
    rows.push(("overall".into(), overall, overall_undefined));
    Ok(RankTable {
        methods: methods.iter().map(|m| m.name()).collect(),
        rows,
    })
}

impl RankTable {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "model,{},undefined", self.methods.join(","))?;
        for (label, errs, undefined) in &self.rows {
            let cells: Vec<String> = errs.iter().map(|&e| sig17(e)).collect();
            writeln!(out, "{label},{},{undefined}", cells.join(","))?;
        }
        Ok(())
    }
}
