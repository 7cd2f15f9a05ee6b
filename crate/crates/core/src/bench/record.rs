use serde::{Deserialize, Serialize};

use super::metrics::Metrics;
use super::scenario::{MetricSignal, Scenario};
use crate::control::PredictorChoice;
use crate::io::fmt17;

/// Per-sample signals of one experiment. Angles in rad, rates in rad/s.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub time: Vec<f64>,
    pub attitude_setpoint: Vec<f64>,
    pub attitude: Vec<f64>,
    pub rate_setpoint: Vec<f64>,
    pub rate: Vec<f64>,
    /// Rate fed to the PID: the measurement, or the predictor output.
    pub prediction: Vec<f64>,
    pub command: Vec<f64>,
    pub disturbance: Vec<f64>,
}

impl Trace {
    pub const HEADER: &'static str = "time,attitude_setpoint,attitude,rate_setpoint,rate,prediction,command,disturbance";

    pub fn with_capacity(n: usize) -> Self {
        let v = || Vec::with_capacity(n);
        Self {
            time: v(),
            attitude_setpoint: v(),
            attitude: v(),
            rate_setpoint: v(),
            rate: v(),
            prediction: v(),
            command: v(),
            disturbance: v(),
        }
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn push(&mut self, t: f64, att_sp: f64, att: f64, rate_sp: f64, rate: f64, pred: f64, cmd: f64, dist: f64) {
        self.time.push(t);
        self.attitude_setpoint.push(att_sp);
        self.attitude.push(att);
        self.rate_setpoint.push(rate_sp);
        self.rate.push(rate);
        self.prediction.push(pred);
        self.command.push(cmd);
        self.disturbance.push(dist);
    }

    /// CSV with one row per sample at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.len() * 8 * 24 + 80);
        s.push_str(Self::HEADER);
        s.push('\n');
        for i in 0..self.len() {
            let row = [
                self.time[i],
                self.attitude_setpoint[i],
                self.attitude[i],
                self.rate_setpoint[i],
                self.rate[i],
                self.prediction[i],
                self.command[i],
                self.disturbance[i],
            ];
            let cells: Vec<String> = row.iter().map(|v| fmt17(*v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Scenario identity carried with the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSummary {
    pub name: String,
    pub plant: String,
    pub variant: PredictorChoice,
    pub added_delay: usize,
    pub payload_fraction: f64,
    pub signal: MetricSignal,
    pub window: f64,
    #[serde(flatten)]
    pub metrics: Metrics,
    /// Time the divergence test fired.
    pub unstable_at: Option<f64>,
    /// Time the simulation stopped early because a state left the bound.
    pub truncated_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub summary: RecordSummary,
    pub trace: Trace,
}

impl ExperimentRecord {
    pub fn metrics(&self) -> &Metrics {
        &self.summary.metrics
    }

    pub fn stable(&self) -> bool {
        self.summary.metrics.stable
    }

    /// One JSON object on a single line.
    pub fn summary_json(&self) -> String {
        serde_json::to_string(&self.summary).expect("summary serializes")
    }

    /// Four-digit human summary.
    pub fn summary_line(&self) -> String {
        let s = &self.summary;
        format!(
            "{:<28} {:<8} h={:<3} payload={:<4} rmse={:.4} mae={:.4} {}",
            s.name,
            s.variant.to_string(),
            s.added_delay,
            format!("{:.2}", s.payload_fraction),
            s.metrics.rmse,
            s.metrics.mae,
            if s.metrics.stable { "stable" } else { "UNSTABLE" }
        )
    }

    pub(crate) fn new(scenario: &Scenario, metrics: Metrics, unstable_at: Option<f64>, truncated_at: Option<f64>, trace: Trace) -> Self {
        Self {
            summary: RecordSummary {
                name: scenario.name.clone(),
                plant: scenario.plant.label().to_string(),
                variant: scenario.variant,
                added_delay: scenario.added_delay,
                payload_fraction: scenario.payload_fraction,
                signal: scenario.metric_signal(),
                window: scenario.metric_window(),
                metrics,
                unstable_at,
                truncated_at,
            },
            trace,
        }
    }
}
