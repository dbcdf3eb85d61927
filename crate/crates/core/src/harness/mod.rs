//! Scenario grids, experiment orchestration, error metrics and file formats.

mod config;
mod experiment;
mod grid;
mod metrics;
mod results;
mod scenario;
mod trace;

pub use config::{CentralEntry, ExperimentConfig, LocalEntry, SimulationSection};
pub use experiment::{outcome_rows, run_grid_experiment, CaseFailure, ExperimentPlan, ExperimentResults};
pub use grid::{apply_variation, default_variations, generate_grid, Parameter, ScenarioSpec, Variation, VariationKind};
pub use metrics::{
    central_fill_summary, compare_waits, comparisons_from_table, error_metrics, error_metrics_by_warehouse,
    fill_rate_deviation, heterogeneity, ranking_report, wait_summary, ErrorPair, ErrorReport, Group, RankFractions,
    RankingReport, RankingRow, WaitComparison, WaitSummaryRow, SIMULATION_SOURCE,
};
pub use results::{
    metric, read_results, read_results_file, write_results, write_results_file, InstanceKey, ResultRow, ResultTable,
    RESULTS_HEADER,
};
pub use scenario::{default_scenarios, resolve_central, simulated_central_fill_rate, CentralRule, CentralScenario};
pub use trace::{
    recalibration_plan, run_trace_experiment, Recalibration, RecalibrationOptions, DEFAULT_HISTORY_WINDOW,
};
