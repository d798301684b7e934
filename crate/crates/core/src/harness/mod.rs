//! Dataset generation, evaluation against simulation, rank tables, timing
//! benchmarks and plot data.

mod bench;
mod dataset;
mod experiment;
mod pipeline;
mod plots;
mod stats;

pub use self::bench::{bench, BenchReport, BenchRow};
pub use self::dataset::{
    build_dataset, DatasetManifest, DatasetSpec, Instance, Record, Split, MANIFEST_FILE,
    MANIFEST_HEADER,
};
pub use self::experiment::{
    curve_scalar, rank_error_table, run_experiment, samples_for, train_predictor, ErrorRow,
    ErrorTable, ExperimentRecord, FixedCurve, Predictor, RankMethod, RankTable, Simulation,
};
pub use self::pipeline::{
    run_pipeline, write_records, write_train_log, PipelineConfig, PipelineOutput, DESK_WIDTH,
};
pub use self::plots::{emit_plot_data, PlotTable};
pub use self::stats::{average_ranks, kruskal_wallis, median, KruskalWallis, ALPHA};
