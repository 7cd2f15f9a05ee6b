use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Doublet: `+amplitude` for `positive_duration`, then `-amplitude` for
/// `negative_duration`, starting at `start`; zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubletSpec {
    pub amplitude: f64,
    #[serde(default = "half_second")]
    pub positive_duration: f64,
    #[serde(default = "half_second")]
    pub negative_duration: f64,
    #[serde(default = "default_start")]
    pub start: f64,
}

fn half_second() -> f64 {
    0.5
}

fn default_start() -> f64 {
    0.2
}

impl DoubletSpec {
    /// 15° attitude doublet, 0.5 s each way, starting at 0.2 s.
    pub fn attitude_default() -> Self {
        Self::with_amplitude(15f64.to_radians())
    }

    /// Same timing as [`attitude_default`](Self::attitude_default) with
    /// another amplitude.
    pub fn with_amplitude(amplitude: f64) -> Self {
        Self {
            amplitude,
            positive_duration: half_second(),
            negative_duration: half_second(),
            start: default_start(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.amplitude.is_finite()
            && self.positive_duration > 0.0
            && self.negative_duration > 0.0
            && self.start >= 0.0
            && self.positive_duration.is_finite()
            && self.negative_duration.is_finite()
            && self.start.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("invalid doublet {self:?}")))
        }
    }

    pub fn end(&self) -> f64 {
        self.start + self.positive_duration + self.negative_duration
    }

    /// Value at time `t`. Phase boundaries are closed on the left.
    pub fn value(&self, t: f64) -> f64 {
        let mid = self.start + self.positive_duration;
        if t < self.start || t >= self.end() {
            0.0
        } else if t < mid {
            self.amplitude
        } else {
            -self.amplitude
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            amplitude: self.amplitude * k,
            ..*self
        }
    }
}

/// Value at sample `k`, evaluated at the exact sample instant `k·Ts` with
/// a small tolerance so that boundaries do not jitter with rounding.
pub(crate) fn doublet_at(d: &DoubletSpec, k: usize, ts: f64) -> f64 {
    d.value(k as f64 * ts + 1e-9 * ts)
}
