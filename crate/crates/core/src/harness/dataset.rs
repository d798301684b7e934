use std::collections::HashSet;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;

use crate::attack::{robustness_curve, AttackKind, AttackStrategy, Metric, RobustnessCurve};
use crate::error::{Error, Result};
use crate::graph::{read_graph, write_graph, Graph};
use crate::netgen::{generate, GenSpec, Model};
use crate::rng::{derive_seed, rng_from_seed};

pub const MANIFEST_FILE: &str = "manifest.tsv";
pub const MANIFEST_HEADER: &str = "#robnet-manifest v1";
const COLUMNS: &str =
    "id\tsplit\tmodel\tn\tm\tdirected\tseed\tattack\trecompute\tmetric\tgraph\tcurve";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Split> {
        match s {
            "train" => Ok(Split::Train),
            "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            _ => Err(Error::Format(format!("unknown split {s:?}"))),
        }
    }
}

/// What to generate: per model, `train + validation + test` graphs with
/// sizes drawn uniformly from `n_range` and average degrees from the
/// model's range.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSpec {
    pub models: Vec<Model>,
    pub n_range: (usize, usize),
    pub train: usize,
    pub validation: usize,
    pub test: usize,
    pub directed: bool,
    pub attack: AttackKind,
    pub recompute: bool,
    pub metric: Metric,
    pub seed: u64,
}

impl DatasetSpec {
    /// Laptop-sized defaults: four models, `N` in 80..=120, 200 training,
    /// 20 validation and 40 test graphs per model, connectivity under random
    /// attack.
    pub fn desk(seed: u64) -> DatasetSpec {
        DatasetSpec {
            models: vec![Model::Er, Model::Ba, Model::SwNw, Model::Qs],
            n_range: (80, 120),
            train: 200,
            validation: 20,
            test: 40,
            directed: false,
            attack: AttackKind::Random,
            recompute: true,
            metric: Metric::Connectivity,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.n_range;
        if lo < 2 || lo > hi {
            return Err(Error::InvalidParameter(format!("bad size range {lo}..={hi}")));
        }
        if self.models.is_empty() {
            return Err(Error::InvalidParameter("no network models selected".into()));
        }
        Ok(())
    }

    fn jobs(&self) -> Vec<(Split, Model, usize)> {
        let mut jobs = Vec::new();
        for &model in &self.models {
            for (split, count) in [
                (Split::Train, self.train),
                (Split::Validation, self.validation),
                (Split::Test, self.test),
            ] {
                jobs.extend((0..count).map(|i| (split, model, i)));
            }
        }
        jobs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub id: String,
    pub split: Split,
    pub model: Model,
    pub n: usize,
    pub m: usize,
    pub directed: bool,
    /// Generation seed; the attack seed is derived from it.
    pub seed: u64,
    pub attack: AttackKind,
    pub recompute: bool,
    pub metric: Metric,
    /// Relative to the manifest directory.
    pub graph_path: PathBuf,
    pub curve_path: PathBuf,
}

impl Record {
    pub fn strategy(&self) -> AttackStrategy {
        AttackStrategy {
            kind: self.attack,
            recompute: self.recompute,
            seed: derive_seed(self.seed, 1),
        }
    }

    fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.id,
            self.split,
            self.model,
            self.n,
            self.m,
            self.directed,
            self.seed,
            self.attack,
            self.recompute,
            self.metric,
            self.graph_path.display(),
            self.curve_path.display()
        )
    }

    fn from_line(line: &str, lineno: usize) -> Result<Record> {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 12 {
            return Err(Error::parse(lineno, format!("expected 12 fields, got {}", f.len())));
        }
        let bad = |what: &str| Error::parse(lineno, format!("bad {what}"));
        Ok(Record {
            id: f[0].to_string(),
            split: f[1].parse()?,
            model: f[2].parse()?,
            n: f[3].parse().map_err(|_| bad("n"))?,
            m: f[4].parse().map_err(|_| bad("m"))?,
            directed: f[5].parse().map_err(|_| bad("directed"))?,
            seed: f[6].parse().map_err(|_| bad("seed"))?,
            attack: f[7].parse()?,
            recompute: f[8].parse().map_err(|_| bad("recompute"))?,
            metric: f[9].parse()?,
            graph_path: f[10].into(),
            curve_path: f[11].into(),
        })
    }
}

/// A generated dataset: records plus the directory their paths are relative
/// to.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetManifest {
    pub root: PathBuf,
    pub records: Vec<Record>,
}

/// One loaded record.
#[derive(Clone, Debug)]
pub struct Instance {
    pub record: Record,
    pub graph: Graph,
    pub curve: RobustnessCurve,
}

pub(crate) fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Generates every graph, simulates its curve and writes graphs, curves and
/// the manifest under `out_dir`.
pub fn build_dataset(spec: &DatasetSpec, out_dir: &Path, workers: usize) -> Result<DatasetManifest> {
    spec.validate()?;
    fs::create_dir_all(out_dir.join("graphs"))?;
    fs::create_dir_all(out_dir.join("curves"))?;
    let jobs = spec.jobs();
    let make = |(idx, &(split, model, i)): (usize, &(Split, Model, usize))| -> Result<Record> {
        let seed = derive_seed(spec.seed, idx as u64);
        let id = format!("{model}-{split}-{i:04}");
        let mut rng = rng_from_seed(derive_seed(seed, 0));
        let n = rng.gen_range(spec.n_range.0..=spec.n_range.1);
        let (klo, khi) = model.degree_range();
        let k = rng.gen_range(klo..=khi);
        let max = n * (n - 1) / 2;
        let m = ((k * n as f64 / 2.0).round() as usize)
            .max(model.min_edges(n))
            .min(max);
        let record = Record {
            graph_path: PathBuf::from("graphs").join(format!("{id}.graph")),
            curve_path: PathBuf::from("curves").join(format!("{id}.csv")),
            id: id.clone(),
            split,
            model,
            n,
            m,
            directed: spec.directed,
            seed,
            attack: spec.attack,
            recompute: spec.recompute,
            metric: spec.metric,
        };
        let run = || -> Result<()> {
            let g = generate(&GenSpec::new(model, n, m, spec.directed, seed))?;
            let curve = robustness_curve(&g, record.strategy(), spec.metric);
            write_graph(&g, BufWriter::new(File::create(out_dir.join(&record.graph_path))?))?;
            curve.write_csv(BufWriter::new(File::create(out_dir.join(&record.curve_path))?))?;
            Ok(())
        };
        run().map_err(|e| Error::Record {
            id,
            source: Box::new(e),
        })?;
        Ok(record)
    };
    let records: Vec<Result<Record>> =
        with_workers(workers, || jobs.par_iter().enumerate().map(make).collect())?;
    let manifest = DatasetManifest {
        root: out_dir.to_path_buf(),
        records: records.into_iter().collect::<Result<_>>()?,
    };
    manifest.save()?;
    Ok(manifest)
}

impl DatasetManifest {
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{MANIFEST_HEADER}")?;
        writeln!(out, "{COLUMNS}")?;
        for r in &self.records {
            writeln!(out, "{}", r.to_line())?;
        }
        Ok(())
    }

    pub fn save(&self) -> Result<()> {
        let mut out = BufWriter::new(File::create(self.root.join(MANIFEST_FILE))?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    /// Parses a manifest without touching the referenced files.
    pub fn parse<R: BufRead>(input: R, root: &Path) -> Result<DatasetManifest> {
        let mut lines = input.lines();
        if lines.next().transpose()?.as_deref() != Some(MANIFEST_HEADER) {
            return Err(Error::parse(1, format!("expected {MANIFEST_HEADER:?}")));
        }
        if lines.next().transpose()?.as_deref() != Some(COLUMNS) {
            return Err(Error::parse(2, "unexpected column header"));
        }
        let mut records = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            records.push(Record::from_line(&line, i + 3)?);
        }
        Ok(DatasetManifest {
            root: root.to_path_buf(),
            records,
        })
    }

    /// Loads `manifest.tsv` from a dataset directory (or the file itself)
    /// and checks ids are unique and every file exists.
    pub fn load(path: &Path) -> Result<DatasetManifest> {
        let (root, file) = if path.is_dir() {
            (path.to_path_buf(), path.join(MANIFEST_FILE))
        } else {
            (
                path.parent().unwrap_or(Path::new(".")).to_path_buf(),
                path.to_path_buf(),
            )
        };
        if !file.exists() {
            return Err(Error::MissingFile(file));
        }
        let m = Self::parse(BufReader::new(File::open(&file)?), &root)?;
        let mut seen = HashSet::new();
        for r in &m.records {
            if !seen.insert(r.id.as_str()) {
                return Err(Error::Format(format!("duplicate record id {}", r.id)));
            }
            for p in [&r.graph_path, &r.curve_path] {
                if !root.join(p).exists() {
                    return Err(Error::MissingFile(root.join(p)));
                }
            }
        }
        Ok(m)
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(move |r| r.split == split)
    }

    pub fn load_instance(&self, r: &Record) -> Result<Instance> {
        let load = || -> Result<Instance> {
            let graph = read_graph(BufReader::new(File::open(self.root.join(&r.graph_path))?))?;
            let curve = RobustnessCurve::read_csv(
                BufReader::new(File::open(self.root.join(&r.curve_path))?),
                r.metric,
            )?;
            if curve.len() != r.n || graph.node_count() != r.n {
                return Err(Error::LengthMismatch {
                    expected: r.n,
                    got: curve.len(),
                });
            }
            Ok(Instance {
                record: r.clone(),
                graph,
                curve,
            })
        };
        load().map_err(|e| Error::Record {
            id: r.id.clone(),
            source: Box::new(e),
        })
    }

    /// Every record of a split, loaded in manifest order.
    pub fn load_split(&self, split: Split, workers: usize) -> Result<Vec<Instance>> {
        let recs: Vec<&Record> = self.split(split).collect();
        with_workers(workers, || {
            recs.par_iter().map(|r| self.load_instance(r)).collect()
        })?
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> DatasetSpec {
        DatasetSpec {
            models: Model::ALL.to_vec(),
            n_range: (20, 30),
            train: 1,
            validation: 0,
            test: 1,
            ..DatasetSpec::desk(seed)
        }
    }

    #[test]
    fn builds_and_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let m = build_dataset(&small(4), dir.path(), 2).unwrap();
        assert_eq!(m.records.len(), 18);
        let back = DatasetManifest::load(dir.path()).unwrap();
        assert_eq!(back, m);
        for r in &m.records {
            let inst = m.load_instance(r).unwrap();
            assert_eq!(inst.curve.len(), r.n);
            assert_eq!(inst.graph.edge_count(), r.m);
            let (lo, hi) = r.model.degree_range();
            let k = inst.graph.average_degree();
            assert!(k >= lo - 0.1 && k <= hi + 0.1, "{} has <k>={k}", r.id);
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        build_dataset(&small(9), a.path(), 1).unwrap();
        build_dataset(&small(9), b.path(), 3).unwrap();
        for f in ["manifest.tsv", "curves/QS-test-0000.csv", "graphs/ER-train-0000.graph"] {
            assert_eq!(
                fs::read(a.path().join(f)).unwrap(),
                fs::read(b.path().join(f)).unwrap(),
                "{f}"
            );
        }
    }

    #[test]
    fn load_checks_files() {
        let dir = tempfile::tempdir().unwrap();
        let m = build_dataset(&small(1), dir.path(), 1).unwrap();
        fs::remove_file(dir.path().join(&m.records[0].curve_path)).unwrap();
        assert!(matches!(DatasetManifest::load(dir.path()), Err(Error::MissingFile(_))));
        assert!(DatasetManifest::parse(&b"nope\n"[..], dir.path()).is_err());
    }
}
