//! Experiment harness: dataset loading and splitting, evidential k-NN
//! classification runs, alpha sweeps and the worked-example reproduction.

mod dataset;
mod experiment;
mod metrics;
mod repro;

pub use dataset::{load_csv, parse_csv, split, CsvSchema, LabeledDataset, TestSize};
pub use experiment::{
    alpha_sweep, classify, AlphaBand, AlphaPoint, AlphaSweepMeta, AlphaSweepReport,
    ClassificationMeta, ClassificationReport, DatasetInfo, ExperimentConfig, MeanMetrics,
    RunResult,
};
pub use metrics::{ConfusionMatrix, Metrics};
pub use repro::{
    repro_tables, repro_tables_with, CellDelta, CombinationColumn, DecisionCell, ReproMeta,
    ReproReport, APPRIOU_R, CELL_TOLERANCE, EXPECTED_DECISIONS, EXPECTED_DEMPSTER,
    EXPECTED_DISJUNCTIVE, EXPECTED_MIXED, SOURCES,
};
