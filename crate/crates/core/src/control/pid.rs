use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

fn default_cutoff() -> f64 {
    30.0
}

/// Rate-loop PID gains and limits for one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatePidGains {
    pub kp: f64,
    #[serde(default)]
    pub ki: f64,
    #[serde(default)]
    pub kd: f64,
    pub integrator_limit: f64,
    pub output_limit: f64,
    /// Cutoff of the first-order filter on the differentiated measurement (Hz).
    #[serde(default = "default_cutoff")]
    pub derivative_cutoff_hz: f64,
}

impl RatePidGains {
    pub fn validate(&self) -> Result<()> {
        let ok = self.kp.is_finite()
            && self.kp > 0.0
            && self.ki.is_finite()
            && self.ki >= 0.0
            && self.kd.is_finite()
            && self.kd >= 0.0
            && self.integrator_limit > 0.0
            && self.output_limit > 0.0
            && self.derivative_cutoff_hz > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("invalid rate PID gains {self:?}")))
        }
    }
}

/// Integrator and derivative-filter memory of one PID.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PidState {
    /// Integral contribution to the output (already multiplied by Ki).
    pub integral: f64,
    filtered: Option<f64>,
}

impl PidState {
    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

/// One PID update. The derivative acts on the low-pass filtered
/// measurement, the integrator is clamped to its limit and frozen whenever
/// integrating would push a saturated output further out.
pub fn rate_pid_step(gains: &RatePidGains, state: &mut PidState, rate_setpoint: f64, rate_feedback: f64, dt: f64) -> Result<f64> {
    ensure_finite(rate_setpoint, "rate setpoint")?;
    ensure_finite(rate_feedback, "rate feedback")?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidSpec(format!("dt must be > 0, got {dt}")));
    }
    let e = rate_setpoint - rate_feedback;
    let wc = 2.0 * std::f64::consts::PI * gains.derivative_cutoff_hz * dt;
    let alpha = wc / (1.0 + wc);
    let prev = state.filtered.unwrap_or(rate_feedback);
    let filtered = prev + alpha * (rate_feedback - prev);
    state.filtered = Some(filtered);
    let d_term = -gains.kd * (filtered - prev) / dt;
    let p_term = gains.kp * e;

    let lim = gains.integrator_limit;
    let candidate = (state.integral + gains.ki * e * dt).clamp(-lim, lim);
    let tentative = p_term + candidate + d_term;
    if tentative.abs() < gains.output_limit || candidate.abs() < state.integral.abs() {
        state.integral = candidate;
    }
    let out = p_term + state.integral + d_term;
    Ok(out.clamp(-gains.output_limit, gains.output_limit))
}
