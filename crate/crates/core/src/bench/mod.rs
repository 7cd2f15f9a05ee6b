//! Experiment harness: closed-loop scenarios on the quadrotor roll plant,
//! arbitrary rate plants and the nonlinear Hex-Jet, with tracking and
//! disturbance metrics and comparison tables.

pub mod experiments;
pub mod hexjet;
pub mod matrix;
pub mod metrics;
pub mod record;
pub mod report;
pub mod runner;
pub mod scenario;
pub mod signals;

pub use matrix::{run_matrix, run_matrix_sequential};
pub use metrics::{mae, overshoot_percent, rmse, settling_time, Metrics};
pub use record::{ExperimentRecord, RecordSummary, Trace};
pub use report::{compare_report, payload_tables, percent_delta, tables_to_csv, tables_to_text, variant_tables, ComparisonReport};
pub use runner::run_scenario;
pub use scenario::{
    ControllerConfig, DisturbanceSpec, Injection, InstabilityCriteria, MetricSignal, ObserverConfig, PlantSpec, Scenario, StateModelConfig,
};
pub use signals::DoubletSpec;
