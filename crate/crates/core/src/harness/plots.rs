use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::experiment::ExperimentRecord;
use crate::attack::{AttackKind, Metric};
use crate::error::{Error, Result};
use crate::netgen::Model;
use crate::text::sig17;

/// Averaged curves for one group of records.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotTable {
    pub predictors: Vec<String>,
    pub sim: Vec<f64>,
    /// Per predictor: mean prediction and mean pointwise error.
    pub pred: Vec<Vec<f64>>,
    pub err: Vec<Vec<f64>>,
}

impl PlotTable {
    /// Averages the simulated curve, each predictor's curve and its pointwise
    /// error over the records. All curves must share one grid.
    pub fn from_records(records: &[&ExperimentRecord]) -> Result<PlotTable> {
        let len = records
            .first()
            .map(|r| r.truth.len())
            .ok_or_else(|| Error::InvalidParameter("no records to plot".into()))?;
        let mut predictors: Vec<String> = Vec::new();
        for r in records {
            if r.truth.len() != len || r.prediction.len() != len {
                return Err(Error::LengthMismatch {
                    expected: len,
                    got: r.prediction.len().min(r.truth.len()),
                });
            }
            if !predictors.contains(&r.predictor) {
                predictors.push(r.predictor.clone());
            }
        }
        let mean = |rows: Vec<&Vec<f64>>| -> Vec<f64> {
            let mut acc = vec![0.0; len];
            for row in &rows {
                for (a, v) in acc.iter_mut().zip(row.iter()) {
                    *a += v;
                }
            }
            acc.into_iter().map(|a| a / rows.len() as f64).collect()
        };
        // Each record appears once per predictor; take the truth from the
        // first predictor's rows so every record counts once.
        let sim = mean(records.iter().filter(|r| r.predictor == predictors[0]).map(|r| &r.truth).collect());
        let mut pred = Vec::new();
        let mut err = Vec::new();
        for p in &predictors {
            let rs: Vec<&&ExperimentRecord> = records.iter().filter(|r| &r.predictor == p).collect();
            pred.push(mean(rs.iter().map(|r| &r.prediction).collect()));
            err.push(mean(rs.iter().map(|r| &r.pointwise).collect()));
        }
        Ok(PlotTable { predictors, sim, pred, err })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "delta,sim")?;
        for p in &self.predictors {
            write!(out, ",pred_{p},err_{p}")?;
        }
        writeln!(out)?;
        let len = self.sim.len();
        for j in 0..len {
            let delta = if len > 1 { j as f64 / (len - 1) as f64 } else { 0.0 };
            write!(out, "{},{}", sig17(delta), sig17(self.sim[j]))?;
            for (p, e) in self.pred.iter().zip(&self.err) {
                write!(out, ",{},{}", sig17(p[j]), sig17(e[j]))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Writes `<attack>_<metric>.csv` over all network models and
/// `<attack>_<metric>_<model>.csv` per model into `dir`. Returns the paths
/// in the order written.
pub fn emit_plot_data(records: &[ExperimentRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut groups: BTreeMap<(AttackKind, Metric), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.attack, r.metric)).or_default().push(r);
    }
    let mut paths = Vec::new();
    let mut emit = |name: String, recs: &[&ExperimentRecord]| -> Result<()> {
        let path = dir.join(name);
        let mut buf = Vec::new();
        PlotTable::from_records(recs)?.write_csv(&mut buf)?;
        fs::write(&path, buf)?;
        paths.push(path);
        Ok(())
    };
    for ((attack, metric), recs) in &groups {
        let stem = format!("{}_{}", attack.name(), metric.name());
        emit(format!("{stem}.csv"), recs)?;
        let mut by_model: BTreeMap<Model, Vec<&ExperimentRecord>> = BTreeMap::new();
        for r in recs {
            by_model.entry(r.model).or_default().push(r);
        }
        for (model, mrecs) in &by_model {
            emit(format!("{stem}_{}.csv", model.name().to_lowercase()), mrecs)?;
        }
    }
    Ok(paths)
}
