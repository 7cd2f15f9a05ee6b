use serde::{Deserialize, Serialize};

use super::signals::DoubletSpec;
use crate::control::{PredictorChoice, RatePidGains};
use crate::error::{Error, Result};
use crate::lti::model_file::ModelFile;
use crate::predictor::ObserverGain;
use crate::vehicle::{HexJetGeometry, PlantMode, ServoParams};

/// Plant under test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlantSpec {
    /// Identified quadrotor roll-rate plant; the attitude is its integral.
    QuadRoll {
        #[serde(default)]
        representation: PlantMode,
    },
    /// Nonlinear six-engine rigid-body model.
    HexJet {
        #[serde(default)]
        geometry: HexJetGeometry,
        #[serde(default)]
        servo: ServoParams,
        /// Axis receiving the attitude doublet: 0 roll, 1 pitch, 2 yaw.
        #[serde(default)]
        axis: usize,
    },
    /// Arbitrary rate plant given as a model file.
    Tf { model: ModelFile },
}

impl Default for PlantSpec {
    fn default() -> Self {
        PlantSpec::QuadRoll {
            representation: PlantMode::Tf,
        }
    }
}

impl PlantSpec {
    pub fn label(&self) -> &'static str {
        match self {
            PlantSpec::QuadRoll { .. } => "quad_roll",
            PlantSpec::HexJet { .. } => "hexjet",
            PlantSpec::Tf { .. } => "tf",
        }
    }

    pub fn sample_time(&self) -> f64 {
        match self {
            PlantSpec::QuadRoll { .. } => crate::models::QUAD_TS,
            PlantSpec::HexJet { .. } => crate::models::HEXJET_TS,
            PlantSpec::Tf { model } => model.sample_time,
        }
    }
}

/// Observer settings used by the state-predictor variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverConfig {
    #[serde(default)]
    pub gain: ObserverGain,
    /// `b̄` of the double-integrator model `ω̈ = b̄ u`.
    pub input_gain: f64,
}

/// Two-state model `x⁺ = A x + B u` propagated by the state predictor. The
/// first state must be the rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateModelConfig {
    pub a: [[f64; 2]; 2],
    pub b: [f64; 2],
}

/// Gains shared by every variant of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    /// Proportional attitude gain (1/s), all axes.
    pub attitude_gain: f64,
    pub rate: RatePidGains,
    pub observer: ObserverConfig,
    /// Predictor model; defaults to the published quadrotor state-space
    /// roll model on the quadrotor and to the linearized axis model on
    /// the Hex-Jet.
    #[serde(default)]
    pub state_model: Option<StateModelConfig>,
}

/// Where an external disturbance enters the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Injection {
    /// Added to the rate-controller output, then delayed with it.
    #[default]
    ControllerOutput,
    /// Added after the injected delay, at the plant input.
    PlantInput,
}

/// Doublet disturbance with the same timing fields as [`DoubletSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceSpec {
    pub amplitude: f64,
    #[serde(default = "half_second")]
    pub positive_duration: f64,
    #[serde(default = "half_second")]
    pub negative_duration: f64,
    #[serde(default = "default_start")]
    pub start: f64,
    #[serde(default)]
    pub injection: Injection,
}

fn half_second() -> f64 {
    0.5
}

fn default_start() -> f64 {
    0.2
}

impl DisturbanceSpec {
    pub fn new(doublet: DoubletSpec, injection: Injection) -> Self {
        Self {
            amplitude: doublet.amplitude,
            positive_duration: doublet.positive_duration,
            negative_duration: doublet.negative_duration,
            start: doublet.start,
            injection,
        }
    }

    pub fn doublet(&self) -> DoubletSpec {
        DoubletSpec {
            amplitude: self.amplitude,
            positive_duration: self.positive_duration,
            negative_duration: self.negative_duration,
            start: self.start,
        }
    }
}

/// Error signal the summary metrics are computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricSignal {
    /// Attitude setpoint minus attitude (rad).
    Attitude,
    /// Rate setpoint minus measured rate (rad/s).
    Rate,
}

/// Divergence test. A sample is an exceedance when the rate magnitude or
/// the attitude error passes its limit. Exceedances separated by at most
/// `persistence` are merged; a merged run spanning at least `persistence`
/// marks the experiment unstable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstabilityCriteria {
    pub rate_limit: f64,
    pub attitude_error_limit_deg: f64,
    pub persistence: f64,
    /// Any state beyond this magnitude stops the simulation.
    pub divergence_bound: f64,
}

impl Default for InstabilityCriteria {
    fn default() -> Self {
        Self {
            rate_limit: 20.0,
            attitude_error_limit_deg: 90.0,
            persistence: 0.1,
            divergence_bound: 1e6,
        }
    }
}

/// One closed-loop experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub plant: PlantSpec,
    pub variant: PredictorChoice,
    /// Samples of delay added to the rate-controller output.
    #[serde(default)]
    pub added_delay: usize,
    /// Extra mass as a fraction of the nominal; the predictors keep the
    /// nominal model.
    #[serde(default)]
    pub payload_fraction: f64,
    #[serde(default)]
    pub setpoint: Option<DoubletSpec>,
    #[serde(default)]
    pub disturbance: Option<DisturbanceSpec>,
    pub duration: f64,
    /// Length of the metric window from t = 0; defaults to 2 s for
    /// attitude metrics and to the end of the disturbance plus 1 s for
    /// rate metrics.
    #[serde(default)]
    pub window: Option<f64>,
    #[serde(default)]
    pub metric: Option<MetricSignal>,
    /// Standard deviation of white rate-measurement noise (rad/s).
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default)]
    pub seed: u64,
    pub controller: ControllerConfig,
    #[serde(default)]
    pub instability: InstabilityCriteria,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(format!("scenario '{}': {m}", self.name)));
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return bad(format!("duration must be > 0, got {}", self.duration));
        }
        if !(self.payload_fraction.is_finite() && self.payload_fraction >= 0.0) {
            return bad(format!("payload fraction must be >= 0, got {}", self.payload_fraction));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return bad(format!("noise std must be >= 0, got {}", self.noise_std));
        }
        if let Some(w) = self.window {
            if !(w > 0.0 && w.is_finite()) {
                return bad(format!("window must be > 0, got {w}"));
            }
        }
        if let Some(d) = &self.setpoint {
            d.validate()?;
        }
        if let Some(d) = &self.disturbance {
            d.doublet().validate()?;
        }
        if !(self.controller.attitude_gain.is_finite() && self.controller.attitude_gain > 0.0) {
            return bad("attitude gain must be > 0".into());
        }
        self.controller.rate.validate()?;
        if let PlantSpec::HexJet { geometry, axis, .. } = &self.plant {
            geometry.validate()?;
            if *axis > 2 {
                return bad(format!("axis must be 0, 1 or 2, got {axis}"));
            }
        }
        let c = &self.instability;
        if !(c.rate_limit > 0.0 && c.attitude_error_limit_deg > 0.0 && c.persistence >= 0.0 && c.divergence_bound > 0.0) {
            return bad(format!("invalid instability criteria {c:?}"));
        }
        Ok(())
    }

    pub fn metric_signal(&self) -> MetricSignal {
        self.metric.unwrap_or(match (&self.setpoint, &self.disturbance) {
            (None, Some(_)) => MetricSignal::Rate,
            _ => MetricSignal::Attitude,
        })
    }

    pub fn metric_window(&self) -> f64 {
        self.window.unwrap_or(match (self.metric_signal(), &self.disturbance) {
            (MetricSignal::Rate, Some(d)) => d.doublet().end() + 1.0,
            _ => 2.0,
        })
    }
}
