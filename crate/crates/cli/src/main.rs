use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use robnet::attack::{robustness_curve, AttackKind, AttackStrategy, Metric};
use robnet::graph::{read_edge_list, read_graph, write_graph, Graph};
use robnet::harness::{
    bench, build_dataset, emit_plot_data, rank_error_table, run_experiment, run_pipeline,
    train_predictor, write_records, write_train_log, DatasetManifest, DatasetSpec, ErrorTable,
    FixedCurve, PipelineConfig, Predictor, RankMethod, Split,
};
use robnet::lfr::{encode, Attribute, Labeling, LfrConfig};
use robnet::netgen::{generate, GenSpec, Model};
use robnet::nn::{
    predict, read_checkpoint, write_checkpoint, LossKind, ModelConfig, NeuralModel, Preset,
    TrainConfig,
};
use robnet::rng::derive_seed;
use robnet::spectral::{spectral_measures, Measure};

#[derive(Parser)]
#[command(name = "robnet", version, about = "Network robustness simulation and CNN prediction")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads for data generation and evaluation.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Directory for every file written.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate one graph, or a whole dataset when --models is given.
    Gen(GenArgs),
    /// Simulate an attack and write the robustness curve.
    Simulate(SimArgs),
    /// Encode a graph as a receptive-field tensor.
    Lfr(LfrArgs),
    /// Train a network on a dataset and write its checkpoint.
    Train(TrainArgs),
    /// Predict the robustness curve of a graph.
    Predict(PredictArgs),
    /// Error table of checkpoints and the mean-curve baseline on the test split.
    Evaluate(EvalArgs),
    /// Spectral robustness measures of an undirected graph.
    Spectral(GraphInput),
    /// Rank errors of checkpoints and spectral measures on the test split.
    RankTable(EvalArgs),
    /// Median wall-clock time per stage.
    Bench(BenchArgs),
    /// Averaged curves and error curves per attack, metric and model.
    Plots(EvalArgs),
    /// Dataset, training, evaluation and plots at desk scale in one go.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct GraphInput {
    /// Graph file in robnet format, or an edge list with --edge-list.
    graph: PathBuf,
    /// Read a plain whitespace-separated edge list.
    #[arg(long)]
    edge_list: bool,
    /// Treat the edge list as directed.
    #[arg(long)]
    directed: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, conflicts_with = "models", required_unless_present = "models")]
    model: Option<Model>,
    #[arg(long, requires = "model")]
    nodes: Option<usize>,
    #[arg(long, requires = "model")]
    edges: Option<usize>,
    /// Comma-separated network models for a dataset.
    #[arg(long, value_delimiter = ',')]
    models: Vec<Model>,
    #[arg(long, default_value_t = 80)]
    n_min: usize,
    #[arg(long, default_value_t = 120)]
    n_max: usize,
    #[arg(long, default_value_t = 200)]
    train: usize,
    #[arg(long, default_value_t = 20)]
    validation: usize,
    #[arg(long, default_value_t = 40)]
    test: usize,
    #[arg(long, default_value_t = AttackKind::Random)]
    attack: AttackKind,
    /// Rank once on the intact graph instead of after every removal.
    #[arg(long = "static")]
    static_rank: bool,
    #[arg(long, default_value_t = Metric::Connectivity)]
    metric: Metric,
    #[arg(long)]
    directed: bool,
    /// Output file for a single graph, relative to --out-dir.
    #[arg(long, default_value = "graph.txt")]
    output: PathBuf,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, default_value_t = AttackKind::Random)]
    attack: AttackKind,
    #[arg(long = "static")]
    static_rank: bool,
    #[arg(long, default_value_t = Metric::Connectivity)]
    metric: Metric,
    /// Output CSV relative to --out-dir; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct LfrOpts {
    /// Number of receptive fields.
    #[arg(long, default_value_t = 100)]
    w: usize,
    /// Nodes per receptive field.
    #[arg(long, default_value_t = 8)]
    g: usize,
    #[arg(long, default_value_t = Labeling::Degree)]
    labeling: Labeling,
    /// Comma-separated attributes out of deg, cc, bet.
    #[arg(long, default_value = "deg,cc")]
    attrs: String,
}

impl LfrOpts {
    fn config(&self) -> Result<LfrConfig> {
        let cfg = LfrConfig {
            w: self.w,
            g: self.g,
            labeling: self.labeling,
            attributes: Attribute::parse_list(&self.attrs)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct LfrArgs {
    #[command(flatten)]
    input: GraphInput,
    #[command(flatten)]
    lfr: LfrOpts,
    #[arg(long, default_value = "fields.lfr")]
    output: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value_t = Preset::LfrCnn)]
    preset: Preset,
    /// Channel scale for the LFR-CNN preset.
    #[arg(long, default_value_t = 1.0)]
    width: f64,
    #[command(flatten)]
    lfr: LfrOpts,
    /// Input side of the PCR preset.
    #[arg(long, default_value_t = 128)]
    pcr_side: usize,
    #[arg(long, default_value_t = 100)]
    output_len: usize,
    #[arg(long, default_value_t = 30)]
    epochs: usize,
    #[arg(long, default_value_t = 16)]
    batch_size: usize,
    /// Epochs without validation improvement before stopping; 0 disables.
    #[arg(long, default_value_t = 5)]
    patience: usize,
    #[arg(long, default_value_t = LossKind::Squared)]
    loss: LossKind,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Trained checkpoints; repeat for several.
    #[arg(long)]
    checkpoint: Vec<PathBuf>,
    /// Grid length of the baseline when no checkpoint is given.
    #[arg(long, default_value_t = 100)]
    output_len: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    checkpoint: Vec<PathBuf>,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = AttackKind::Random)]
    attack: AttackKind,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    epochs: Option<usize>,
}

fn load_graph(input: &GraphInput) -> Result<Graph> {
    let file = File::open(&input.graph).with_context(|| format!("opening {}", input.graph.display()))?;
    let r = BufReader::new(file);
    let g = if input.edge_list {
        read_edge_list(r, input.directed)
    } else {
        read_graph(r)
    };
    g.with_context(|| format!("reading {}", input.graph.display()))
}

fn load_checkpoint(path: &Path) -> Result<NeuralModel<f32>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_checkpoint(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn create(out_dir: &Path, rel: &Path) -> Result<BufWriter<File>> {
    let path = out_dir.join(rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_out(out_dir: &Path, rel: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> robnet::Result<()>) -> Result<()> {
    match rel {
        Some(rel) => {
            let mut w = create(out_dir, rel)?;
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            f(&mut w)?;
        }
    }
    Ok(())
}

fn strategy(kind: AttackKind, static_rank: bool, seed: u64) -> AttackStrategy {
    let s = AttackStrategy::new(kind, derive_seed(seed, 1));
    if static_rank {
        s.static_rank()
    } else {
        s
    }
}

fn load_models(paths: &[PathBuf]) -> Result<Vec<NeuralModel<f32>>> {
    paths.iter().map(|p| load_checkpoint(p)).collect()
}

fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    DatasetManifest::load(path).with_context(|| format!("loading {}", path.display()))
}

fn predictors<'a>(models: &'a [NeuralModel<f32>], baseline: &'a FixedCurve) -> Vec<&'a dyn Predictor> {
    let mut ps: Vec<&dyn Predictor> = models.iter().map(|m| m as &dyn Predictor).collect();
    ps.push(baseline);
    ps
}

fn baseline(manifest: &DatasetManifest, models: &[NeuralModel<f32>], len: usize, workers: usize) -> Result<FixedCurve> {
    let len = models.first().map_or(len, |m| m.config.output_len);
    if models.iter().any(|m| m.config.output_len != len) {
        bail!("checkpoints disagree on the output grid length");
    }
    Ok(FixedCurve::mean_of(&manifest.load_split(Split::Train, workers)?, len)?)
}

fn run(cli: Cli) -> Result<()> {
    let out = &cli.out_dir;
    fs::create_dir_all(out)?;
    match cli.cmd {
        Cmd::Gen(a) => {
            if let Some(model) = a.model {
                let n = a.nodes.context("--nodes is required with --model")?;
                let m = a.edges.context("--edges is required with --model")?;
                let g = generate(&GenSpec::new(model, n, m, a.directed, cli.seed))?;
                let mut w = create(out, &a.output)?;
                write_graph(&g, &mut w)?;
                w.flush()?;
            } else {
                let spec = DatasetSpec {
                    models: a.models,
                    n_range: (a.n_min, a.n_max),
                    train: a.train,
                    validation: a.validation,
                    test: a.test,
                    directed: a.directed,
                    attack: a.attack,
                    recompute: !a.static_rank,
                    metric: a.metric,
                    seed: cli.seed,
                };
                let m = build_dataset(&spec, out, cli.workers)?;
                eprintln!("{} records in {}", m.records.len(), out.display());
            }
        }
        Cmd::Simulate(a) => {
            let g = load_graph(&a.input)?;
            let curve = robustness_curve(&g, strategy(a.attack, a.static_rank, cli.seed), a.metric);
            write_out(out, a.output.as_deref(), |w| curve.write_csv(w))?;
        }
        Cmd::Lfr(a) => {
            let g = load_graph(&a.input)?;
            let t = encode(&g, &a.lfr.config()?);
            let mut w = create(out, &a.output)?;
            t.write_to(&mut w)?;
            w.flush()?;
        }
        Cmd::Train(a) => {
            let manifest = load_manifest(&a.manifest)?;
            let metric = manifest
                .records
                .first()
                .map(|r| r.metric)
                .context("empty manifest")?;
            let lfr = a.lfr.config()?;
            let mut cfg = match a.preset {
                Preset::LfrCnn => ModelConfig::lfr_cnn_with_width(lfr, a.output_len, cli.seed, a.width),
                p => ModelConfig::preset(p, lfr, a.pcr_side, a.output_len, cli.seed),
            };
            cfg.metric = metric;
            cfg.loss = a.loss;
            let tc = TrainConfig {
                epochs: a.epochs,
                batch_size: a.batch_size,
                patience: (a.patience > 0).then_some(a.patience),
                workers: cli.workers,
            };
            let (model, log) = train_predictor(&manifest, cfg, &tc, cli.workers)?;
            let name = model.config.name.clone();
            let mut w = create(out, Path::new(&format!("{name}.ckpt")))?;
            write_checkpoint(&model, &mut w)?;
            w.flush()?;
            let mut w = create(out, Path::new(&format!("{name}.train.csv")))?;
            write_train_log(&log, &mut w)?;
            w.flush()?;
            eprintln!(
                "{name}: {} parameters, best epoch {} of {}",
                model.param_count(),
                log.best_epoch + 1,
                log.epochs.len()
            );
        }
        Cmd::Predict(a) => {
            let m = load_checkpoint(&a.checkpoint)?;
            let g = load_graph(&a.input)?;
            let curve = predict(&m, &g)?;
            write_out(out, a.output.as_deref(), |w| curve.write_csv(w))?;
        }
        Cmd::Evaluate(a) => {
            let manifest = load_manifest(&a.manifest)?;
            let models = load_models(&a.checkpoint)?;
            let base = baseline(&manifest, &models, a.output_len, cli.workers)?;
            let test = manifest.load_split(Split::Test, cli.workers)?;
            let records = run_experiment(&test, &predictors(&models, &base), cli.workers)?;
            let mut w = create(out, Path::new("errors.csv"))?;
            ErrorTable::from_records(&records).write_csv(&mut w)?;
            w.flush()?;
            let mut w = create(out, Path::new("records.csv"))?;
            write_records(&records, &mut w)?;
            w.flush()?;
        }
        Cmd::Spectral(a) => {
            let g = load_graph(&a)?;
            let report = spectral_measures(&g)?;
            report.write_csv(io::stdout().lock())?;
        }
        Cmd::RankTable(a) => {
            let manifest = load_manifest(&a.manifest)?;
            let models = load_models(&a.checkpoint)?;
            let base = baseline(&manifest, &models, a.output_len, cli.workers)?;
            let test = manifest.load_split(Split::Test, cli.workers)?;
            let mut methods: Vec<RankMethod> = predictors(&models, &base)
                .into_iter()
                .map(RankMethod::Predictor)
                .collect();
            methods.extend(Measure::ALL.iter().map(|&m| RankMethod::Spectral(m)));
            let table = rank_error_table(&test, &methods, cli.workers)?;
            let mut w = create(out, Path::new("rank.csv"))?;
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        Cmd::Bench(a) => {
            let manifest = load_manifest(&a.manifest)?;
            let models = load_models(&a.checkpoint)?;
            let graphs: Vec<Graph> = manifest
                .load_split(Split::Test, cli.workers)?
                .into_iter()
                .map(|i| i.graph)
                .collect();
            let refs: Vec<&NeuralModel<f32>> = models.iter().collect();
            let report = bench(&graphs, &refs, strategy(a.attack, false, cli.seed), a.runs)?;
            let mut w = create(out, Path::new("bench.csv"))?;
            report.write_csv(&mut w)?;
            w.flush()?;
            report.write_csv(io::stdout().lock())?;
        }
        Cmd::Plots(a) => {
            let manifest = load_manifest(&a.manifest)?;
            let models = load_models(&a.checkpoint)?;
            let base = baseline(&manifest, &models, a.output_len, cli.workers)?;
            let test = manifest.load_split(Split::Test, cli.workers)?;
            let records = run_experiment(&test, &predictors(&models, &base), cli.workers)?;
            for p in emit_plot_data(&records, out)? {
                eprintln!("{}", p.display());
            }
        }
        Cmd::Pipeline(a) => {
            let mut cfg = PipelineConfig::desk(cli.seed);
            if let Some(e) = a.epochs {
                cfg.train.epochs = e;
            }
            cfg.train.workers = cli.workers;
            let result = run_pipeline(&cfg, out, cli.workers)?;
            result.errors.write_csv(io::stdout().lock())?;
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
