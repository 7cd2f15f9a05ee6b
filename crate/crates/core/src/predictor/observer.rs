use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// How the observer gain is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ObserverGain {
    /// Desired discrete poles of the estimation-error dynamics.
    Poles { p1: f64, p2: f64 },
    /// Explicit discrete gains `[β1, β2]`.
    Gains { beta1: f64, beta2: f64 },
}

impl Default for ObserverGain {
    fn default() -> Self {
        ObserverGain::Poles { p1: 0.85, p2: 0.85 }
    }
}

/// Luenberger observer for the rate channel modelled as a double
/// integrator `ω̈ = b u`, discretized exactly at the loop sample time:
///
/// `x̂⁺ = Φ x̂ + Γ u + L (y − C x̂)`, with `Φ = [[1, Ts], [0, 1]]`,
/// `Γ = b [Ts²/2, Ts]`, `C = [1 0]`.
#[derive(Debug, Clone)]
pub struct LuenbergerObserver {
    phi: Matrix2<f64>,
    gamma: Vector2<f64>,
    gain: Vector2<f64>,
    estimate: Vector2<f64>,
    ts: f64,
}

impl LuenbergerObserver {
    pub fn new(gain: ObserverGain, input_gain: f64, sample_time: f64) -> Result<Self> {
        if !(sample_time.is_finite() && sample_time > 0.0) {
            return Err(Error::InvalidSpec(format!("observer sample time must be > 0, got {sample_time}")));
        }
        ensure_finite(input_gain, "observer input gain")?;
        let ts = sample_time;
        let (b1, b2) = match gain {
            ObserverGain::Poles { p1, p2 } => {
                let b1 = 2.0 - (p1 + p2);
                (b1, (p1 * p2 - 1.0 + b1) / ts)
            }
            ObserverGain::Gains { beta1, beta2 } => (beta1, beta2),
        };
        let obs = Self {
            phi: Matrix2::new(1.0, ts, 0.0, 1.0),
            gamma: Vector2::new(0.5 * ts * ts, ts) * input_gain,
            gain: Vector2::new(b1, b2),
            estimate: Vector2::zeros(),
            ts,
        };
        let rho = obs.error_spectral_radius();
        if !(rho < 1.0) {
            return Err(Error::UnstableObserver(rho));
        }
        Ok(obs)
    }

    pub fn gains(&self) -> [f64; 2] {
        [self.gain[0], self.gain[1]]
    }

    pub fn sample_time(&self) -> f64 {
        self.ts
    }

    /// Error dynamics matrix `Φ − L C`.
    pub fn error_matrix(&self) -> Matrix2<f64> {
        let mut m = self.phi;
        m[(0, 0)] -= self.gain[0];
        m[(1, 0)] -= self.gain[1];
        m
    }

    pub fn error_spectral_radius(&self) -> f64 {
        self.error_matrix()
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Current estimate `[ω̂, dω̂/dt]`.
    pub fn estimate(&self) -> [f64; 2] {
        [self.estimate[0], self.estimate[1]]
    }

    pub fn set_estimate(&mut self, x: [f64; 2]) {
        self.estimate = Vector2::new(x[0], x[1]);
    }

    /// Advances one sample with the input applied to the plant and the
    /// rate measured at this sample; returns the new estimate.
    pub fn step(&mut self, control_input: f64, measured_rate: f64) -> Result<[f64; 2]> {
        ensure_finite(control_input, "observer input")?;
        ensure_finite(measured_rate, "observer measurement")?;
        let innovation = measured_rate - self.estimate[0];
        self.estimate = self.phi * self.estimate + self.gamma * control_input + self.gain * innovation;
        Ok(self.estimate())
    }

    pub fn reset(&mut self) {
        self.estimate = Vector2::zeros();
    }
}

/// Exact discretization of the double integrator driven by `b u`.
pub fn double_integrator(input_gain: f64, ts: f64) -> (Matrix2<f64>, Vector2<f64>) {
    (Matrix2::new(1.0, ts, 0.0, 1.0), Vector2::new(0.5 * ts * ts, ts) * input_gain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TS: f64 = 0.0025;

    #[test]
    fn default_gains() {
        let o = LuenbergerObserver::new(ObserverGain::default(), 1.0, TS).unwrap();
        let [b1, b2] = o.gains();
        assert_relative_eq!(b1, 0.3, epsilon = 1e-12);
        assert_relative_eq!(b2, 9.0, epsilon = 1e-9);
        assert_relative_eq!(o.error_spectral_radius(), 0.85, epsilon = 1e-6);
    }

    #[test]
    fn unstable_gain_rejected() {
        let r = LuenbergerObserver::new(ObserverGain::Gains { beta1: 0.0, beta2: 0.0 }, 1.0, TS);
        assert!(matches!(r, Err(Error::UnstableObserver(_))));
        let r = LuenbergerObserver::new(ObserverGain::Poles { p1: 1.2, p2: 0.5 }, 1.0, TS);
        assert!(matches!(r, Err(Error::UnstableObserver(_))));
    }

    #[test]
    fn equilibrium_stays_zero() {
        let mut o = LuenbergerObserver::new(ObserverGain::default(), 1.0, TS).unwrap();
        for _ in 0..100 {
            assert_eq!(o.step(0.0, 0.0).unwrap(), [0.0, 0.0]);
        }
    }

    #[test]
    fn tracks_constant_rate() {
        let mut o = LuenbergerObserver::new(ObserverGain::default(), 1.0, TS).unwrap();
        let mut x = [0.0, 0.0];
        for _ in 0..2000 {
            x = o.step(0.0, 1.7).unwrap();
        }
        assert_relative_eq!(x[0], 1.7, epsilon = 1e-9);
        assert!(x[1].abs() < 1e-9);
    }

    #[test]
    fn converges_on_chirp_driven_double_integrator() {
        let (phi, gamma) = double_integrator(1.0, TS);
        let mut o = LuenbergerObserver::new(ObserverGain::Poles { p1: 0.9, p2: 0.9 }, 1.0, TS).unwrap();
        let mut x = Vector2::new(0.5, -2.0);
        let mut err = f64::INFINITY;
        for k in 0..500 {
            let t = k as f64 * TS;
            let u = (2.0 * std::f64::consts::PI * (1.0 + 10.0 * t) * t).sin();
            let y = x[0];
            let est = o.step(u, y).unwrap();
            x = phi * x + gamma * u;
            err = ((est[0] - x[0]).powi(2) + (est[1] - x[1]).powi(2)).sqrt();
        }
        assert!(err < 1e-3, "error {err}");
    }

    #[test]
    fn error_decay_rate_matches_spectral_radius() {
        let (phi, gamma) = double_integrator(1.0, TS);
        let mut o = LuenbergerObserver::new(ObserverGain::Poles { p1: 0.85, p2: 0.7 }, 1.0, TS).unwrap();
        let mut x = Vector2::new(1.0, 3.0);
        let mut logs = Vec::new();
        for _ in 0..120 {
            let est = o.step(0.0, x[0]).unwrap();
            x = phi * x + gamma * 0.0;
            logs.push(((est[0] - x[0]).powi(2) + (est[1] - x[1]).powi(2)).sqrt().ln());
        }
        let slope = (logs[110] - logs[30]) / 80.0;
        let want = o.error_spectral_radius().ln();
        assert!((slope - want).abs() < 0.1 * want.abs(), "slope {slope}, want {want}");
    }
}
