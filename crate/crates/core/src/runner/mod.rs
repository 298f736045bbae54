//! Configuration, archive persistence, metric export and the command line.

mod archive;
mod cli;
mod config;
mod metrics;

pub use archive::{run_id, write_atomic, ArchiveError, ArchiveHeader, ArchiveWriter, StoredArchive, FORMAT_VERSION};
pub use cli::{
    run_cli, ARCHIVE_FILE, EVAL_FILE, EXIT_CONFIG, EXIT_HEURISTIC, EXIT_INIT_EXHAUSTED, EXIT_OK, FRONT_FILE,
    HEATMAP_FILE, METRICS_FILE,
};
pub use config::{
    BppProblem, Config, ConfigError, DslLimits, Environment, GeneratorMode, LlmConfig, ProblemConfig, TspProblem,
};
pub use metrics::{compute_metrics, front_csv, heatmap_csv, live_progress, metrics_csv, MetricsRow, Progress, UNFILLED};
