use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Logarithmic chirp excitation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub f_start: f64,
    pub f_end: f64,
    pub duration: f64,
    pub amplitude: f64,
    pub sample_time: f64,
    /// Fraction of the duration tapered with a half-cosine at each end.
    #[serde(default = "default_taper")]
    pub taper_fraction: f64,
}

fn default_taper() -> f64 {
    0.05
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let nyq = 0.5 / self.sample_time;
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if !(self.sample_time.is_finite() && self.sample_time > 0.0) {
            return bad(format!("sample time must be > 0, got {}", self.sample_time));
        }
        if !(self.f_start > 0.0 && self.f_start <= self.f_end) {
            return bad(format!("need 0 < f_start <= f_end, got {} and {}", self.f_start, self.f_end));
        }
        if self.f_end > nyq * (1.0 + 1e-12) {
            return Err(Error::FrequencyOutOfRange {
                frequency: self.f_end,
                nyquist: nyq,
            });
        }
        if !(self.duration.is_finite() && self.duration * self.f_start >= 3.0 - 1e-9) {
            return bad(format!("duration {} s covers fewer than 3 periods of f_start", self.duration));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::NonFinite("sweep amplitude"));
        }
        if !(0.0..=0.5).contains(&self.taper_fraction) {
            return bad(format!("taper fraction must be in [0, 0.5], got {}", self.taper_fraction));
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        (self.duration / self.sample_time).round() as usize
    }

    /// Instantaneous frequency (Hz) at time `t`.
    pub fn instantaneous_frequency(&self, t: f64) -> f64 {
        self.f_start * (self.f_end / self.f_start).powf(t / self.duration)
    }

    fn phase(&self, t: f64) -> f64 {
        let k = self.f_end / self.f_start;
        let two_pi = 2.0 * std::f64::consts::PI;
        if (k - 1.0).abs() < 1e-12 {
            two_pi * self.f_start * t
        } else {
            two_pi * self.f_start * self.duration / k.ln() * (k.powf(t / self.duration) - 1.0)
        }
    }

    fn taper(&self, t: f64) -> f64 {
        let w = self.taper_fraction * self.duration;
        if w <= 0.0 {
            return 1.0;
        }
        let edge = t.min(self.duration - t);
        if edge >= w {
            1.0
        } else {
            0.5 * (1.0 - (std::f64::consts::PI * edge.max(0.0) / w).cos())
        }
    }
}

/// Samples of `A · taper(t) · sin(φ(t))` at `t = k Ts`.
pub fn generate_sweep(spec: &SweepSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.samples();
    Ok((0..n)
        .map(|k| {
            let t = k as f64 * spec.sample_time;
            spec.amplitude * spec.taper(t) * spec.phase(t).sin()
        })
        .collect())
}
