use super::record::ExperimentRecord;
use super::runner::run_scenario;
use super::scenario::Scenario;
use crate::error::Result;
use crate::par;

/// Runs independent scenarios on the worker pool; results keep the input
/// order.
pub fn run_matrix(scenarios: &[Scenario]) -> Vec<Result<ExperimentRecord>> {
    par::map(scenarios, run_scenario)
}

/// Single-threaded reference for [`run_matrix`].
pub fn run_matrix_sequential(scenarios: &[Scenario]) -> Vec<Result<ExperimentRecord>> {
    par::map_sequential(scenarios, run_scenario)
}
