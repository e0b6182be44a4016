//! Replicated cohort statistics and parameter sweeps.

mod heatmap;
mod metrics;
mod output;
mod plan;
mod presets;
mod sweep;

pub use heatmap::{heatmap, Heatmap, HeatmapQuery};
pub use metrics::{
    cohort_metrics, replicate_stats, CohortMetrics, Metric, MetricStat, ReplicateStats,
    FREQ_K_MAX, FREQ_K_MIN,
};
pub use output::{format_sig10, to_csv_string, to_json_string, write_csv, CSV_HEADER};
pub use plan::{
    SweepPlan, DEFAULT_BOUNDS, DEFAULT_N_FUNDS, DEFAULT_N_REPLICATES, DEFAULT_POOL_SIZE,
    DEFAULT_PORTFOLIO_SIZES, DEFAULT_SEED, DEFAULT_WORLD_ALPHA, DEFAULT_X_MIN,
};
pub use presets::{preset, preset_names, PRESETS};
pub use sweep::{grid_keys, run_sweep, GridKey, Provenance, SweepResult, SweepRow};
