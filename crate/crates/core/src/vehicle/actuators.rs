use serde::{Deserialize, Serialize};

use super::forces::ThrustState;
use super::geometry::{group_of, Group, HexJetGeometry};
use crate::error::{Error, Result};
use crate::lti::{DelayedTransferFunction, TfState};

/// Tilt servo model: first-order lag with a slew-rate limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServoParams {
    pub time_constant: f64,
    /// Slew-rate limit (rad/s).
    pub rate_limit: f64,
}

impl Default for ServoParams {
    fn default() -> Self {
        Self {
            time_constant: 0.02,
            rate_limit: 300f64.to_radians(),
        }
    }
}

/// Six engines driven through a thrust-response model and two tilt servos.
#[derive(Debug, Clone)]
pub struct ActuatorBank {
    engines: Vec<TfState>,
    output: [f64; 6],
    alpha: [f64; 2],
    servo: ServoParams,
    max_thrust: f64,
    tilt_limit: f64,
    dt: f64,
}

impl ActuatorBank {
    /// `engine_model` maps throttle to a thrust fraction and should have
    /// unity DC gain; its sample time sets the actuator step.
    pub fn new(engine_model: &DelayedTransferFunction, servo: ServoParams, geom: &HexJetGeometry) -> Result<Self> {
        if !(servo.time_constant > 0.0 && servo.rate_limit > 0.0) {
            return Err(Error::InvalidSpec(format!("invalid servo parameters {servo:?}")));
        }
        Ok(Self {
            engines: (0..6).map(|_| TfState::new(engine_model)).collect(),
            output: [0.0; 6],
            alpha: [0.0; 2],
            servo,
            max_thrust: geom.max_thrust,
            tilt_limit: geom.tilt_limit,
            dt: engine_model.sample_time(),
        })
    }

    /// Steady state at constant throttles and tilts.
    pub fn trim(&mut self, throttle: [f64; 6], alpha1: f64, alpha2: f64) {
        for (e, (&t, o)) in self.engines.iter_mut().zip(throttle.iter().zip(self.output.iter_mut())) {
            e.settle(t);
            *o = t;
        }
        self.alpha = [alpha1, alpha2];
    }

    pub fn sample_time(&self) -> f64 {
        self.dt
    }

    /// Current thrusts and tilts.
    pub fn thrust_state(&self) -> ThrustState {
        ThrustState {
            thrust: self.output.map(|o| o * self.max_thrust),
            alpha1: self.alpha[0],
            alpha2: self.alpha[1],
        }
    }

    /// Advances one sample with group commands (throttles in [0, 1]).
    pub fn step_grouped(&mut self, throttle_left: f64, throttle_right: f64, alpha1_cmd: f64, alpha2_cmd: f64) -> Result<ThrustState> {
        let mut throttle = [0.0; 6];
        for (i, t) in throttle.iter_mut().enumerate() {
            *t = match group_of(i) {
                Group::Left => throttle_left,
                Group::Right => throttle_right,
            };
        }
        self.step(throttle, alpha1_cmd, alpha2_cmd)
    }

    pub fn step(&mut self, throttle: [f64; 6], alpha1_cmd: f64, alpha2_cmd: f64) -> Result<ThrustState> {
        for (i, e) in self.engines.iter_mut().enumerate() {
            self.output[i] = e.step(throttle[i].clamp(0.0, 1.0))?.max(0.0);
        }
        for (a, cmd) in self.alpha.iter_mut().zip([alpha1_cmd, alpha2_cmd]) {
            let cmd = cmd.clamp(-self.tilt_limit, self.tilt_limit);
            let rate = ((cmd - *a) / self.servo.time_constant).clamp(-self.servo.rate_limit, self.servo.rate_limit);
            *a = (*a + rate * self.dt).clamp(-self.tilt_limit, self.tilt_limit);
        }
        Ok(self.thrust_state())
    }
}

/// Engine thrust model normalized to unity DC gain.
pub fn normalized(model: &DelayedTransferFunction) -> Result<DelayedTransferFunction> {
    let k = model.dc_gain()?;
    Ok(model.scaled(1.0 / k))
}
