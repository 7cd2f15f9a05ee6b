use nalgebra::{DVector, Quaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::attitude::{attitude_step, AttitudeGains};
use super::pid::{rate_pid_step, PidState, RatePidGains};
use crate::error::{Error, Result};
use crate::predictor::{LuenbergerObserver, SmithPredictor, StatePredictor};

/// Which delay compensator sits in the rate feedback path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictorChoice {
    #[serde(rename = "baseline", alias = "none")]
    None,
    Smith,
    State,
}

impl std::fmt::Display for PredictorChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PredictorChoice::None => "baseline",
            PredictorChoice::Smith => "smith",
            PredictorChoice::State => "state",
        })
    }
}

/// Delay compensator instance for one rate loop.
#[derive(Debug, Clone)]
pub enum Compensator {
    None,
    Smith(SmithPredictor),
    State {
        predictor: StatePredictor,
        observer: LuenbergerObserver,
    },
}

impl Compensator {
    pub fn choice(&self) -> PredictorChoice {
        match self {
            Compensator::None => PredictorChoice::None,
            Compensator::Smith(_) => PredictorChoice::Smith,
            Compensator::State { .. } => PredictorChoice::State,
        }
    }

    fn sample_time(&self) -> Option<f64> {
        match self {
            Compensator::None => None,
            Compensator::Smith(s) => Some(s.sample_time()),
            Compensator::State { observer, .. } => Some(observer.sample_time()),
        }
    }

    /// Rate the controller should act on, given the raw measurement.
    fn feedback(&self, measured: f64) -> Result<f64> {
        match self {
            Compensator::None => Ok(measured),
            Compensator::Smith(s) => Ok(s.feedback(measured)),
            Compensator::State { predictor, observer } => {
                let x = DVector::from_row_slice(&observer.estimate());
                Ok(predictor.predict(&x)?[0])
            }
        }
    }

    fn update(&mut self, command: f64, measured: f64) -> Result<()> {
        match self {
            Compensator::None => Ok(()),
            Compensator::Smith(s) => s.update(command),
            Compensator::State { predictor, observer } => {
                let applied = predictor.push_input(command);
                observer.step(applied, measured).map(|_| ())
            }
        }
    }
}

/// Signals produced by one rate-loop update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateLoopOutput {
    pub setpoint: f64,
    pub measured: f64,
    /// Rate actually fed to the PID (the prediction when compensated).
    pub feedback: f64,
    pub command: f64,
}

/// PID rate loop with an optional delay compensator.
#[derive(Debug, Clone)]
pub struct RateLoop {
    gains: RatePidGains,
    pid: PidState,
    compensator: Compensator,
    ts: f64,
}

impl RateLoop {
    pub fn new(gains: RatePidGains, compensator: Compensator, sample_time: f64) -> Result<Self> {
        gains.validate()?;
        if let Some(ts) = compensator.sample_time() {
            if (ts - sample_time).abs() > 1e-12 * sample_time {
                return Err(Error::SampleTimeMismatch {
                    left: ts,
                    right: sample_time,
                });
            }
        }
        Ok(Self {
            gains,
            pid: PidState::default(),
            compensator,
            ts: sample_time,
        })
    }

    pub fn choice(&self) -> PredictorChoice {
        self.compensator.choice()
    }

    pub fn step(&mut self, rate_setpoint: f64, measured: f64) -> Result<RateLoopOutput> {
        let feedback = self.compensator.feedback(measured)?;
        let command = rate_pid_step(&self.gains, &mut self.pid, rate_setpoint, feedback, self.ts)?;
        self.compensator.update(command, measured)?;
        Ok(RateLoopOutput {
            setpoint: rate_setpoint,
            measured,
            feedback,
            command,
        })
    }

    pub fn pid_state(&self) -> &PidState {
        &self.pid
    }
}

/// Per-axis outputs of one cascade update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeOutput {
    pub rate_setpoint: Vector3<f64>,
    pub feedback: Vector3<f64>,
    pub command: Vector3<f64>,
}

/// Quaternion-P attitude loop commanding three decoupled rate loops.
#[derive(Debug, Clone)]
pub struct CascadeController {
    attitude: AttitudeGains,
    axes: [RateLoop; 3],
}

impl CascadeController {
    pub fn new(attitude: AttitudeGains, axes: [RateLoop; 3]) -> Self {
        Self { attitude, axes }
    }

    pub fn axis(&self, i: usize) -> &RateLoop {
        &self.axes[i]
    }

    pub fn step(&mut self, setpoint: &Quaternion<f64>, attitude: &Quaternion<f64>, rates: &Vector3<f64>) -> Result<CascadeOutput> {
        let rate_sp = attitude_step(&self.attitude, setpoint, attitude)?;
        let mut fb = Vector3::zeros();
        let mut cmd = Vector3::zeros();
        for i in 0..3 {
            let o = self.axes[i].step(rate_sp[i], rates[i])?;
            fb[i] = o.feedback;
            cmd[i] = o.command;
        }
        Ok(CascadeOutput {
            rate_setpoint: rate_sp,
            feedback: fb,
            command: cmd,
        })
    }
}

/// Functional form of one cascade update on a single axis: attitude error
/// to rate setpoint, then the compensated rate loop.
pub fn cascade_step(gains: &AttitudeGains, rate: &mut RateLoop, setpoint: &Quaternion<f64>, attitude: &Quaternion<f64>, measured_rate: f64, axis: usize) -> Result<RateLoopOutput> {
    let sp = attitude_step(gains, setpoint, attitude)?;
    rate.step(sp[axis], measured_rate)
}
