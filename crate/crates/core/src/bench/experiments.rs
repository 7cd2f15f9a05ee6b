//! Constructors for the standard experiments on the quadrotor roll plant.

use super::scenario::{ControllerConfig, DisturbanceSpec, Injection, ObserverConfig, PlantSpec, Scenario};
use super::signals::DoubletSpec;
use crate::control::{PredictorChoice, RatePidGains};
use crate::predictor::ObserverGain;
use crate::vehicle::PlantMode;

/// Simulated time of the standard experiments. Longer than the metric
/// windows so that slowly growing oscillations reach the divergence test.
pub const EXPERIMENT_DURATION: f64 = 6.0;

/// Disturbance doublet amplitude at the rate-controller output.
pub const DISTURBANCE_AMPLITUDE: f64 = 0.1;

/// Shipped quadrotor roll gains, also in `configs/quad_gains.toml`. Found
/// by random search (`examples/tune_gains.rs`) against the stability
/// regime and disturbance ordering of the comparison experiments, then
/// rounded.
pub fn quad_default_controller() -> ControllerConfig {
    ControllerConfig {
        attitude_gain: 7.0,
        rate: RatePidGains {
            kp: 0.05,
            ki: 1.3,
            kd: 0.0003,
            integrator_limit: 0.4,
            output_limit: 0.8,
            derivative_cutoff_hz: 30.0,
        },
        observer: ObserverConfig {
            gain: ObserverGain::Poles { p1: 0.8, p2: 0.8 },
            input_gain: 250.0,
        },
        state_model: None,
    }
}

/// Shipped Hex-Jet gains (`configs/hexjet.toml`). The command is an
/// angular acceleration, so the observer input gain is 1.
pub fn hexjet_default_controller() -> ControllerConfig {
    ControllerConfig {
        attitude_gain: 2.0,
        rate: RatePidGains {
            kp: 1.0,
            ki: 0.5,
            kd: 0.0,
            integrator_limit: 2.0,
            output_limit: 20.0,
            derivative_cutoff_hz: 30.0,
        },
        observer: ObserverConfig {
            gain: ObserverGain::Poles { p1: 0.85, p2: 0.85 },
            input_gain: 1.0,
        },
        state_model: None,
    }
}

/// Hex-Jet flight-test analogue: 10° doublet on `axis`.
pub fn hexjet_tracking(variant: PredictorChoice, h: usize, payload: f64, axis: usize, controller: &ControllerConfig) -> Scenario {
    let mut s = base(tag(&format!("hexjet{axis}"), variant, h, payload), variant, h, payload, controller);
    s.plant = PlantSpec::HexJet {
        geometry: Default::default(),
        servo: Default::default(),
        axis,
    };
    s.setpoint = Some(DoubletSpec::with_amplitude(10f64.to_radians()));
    s
}

fn base(name: String, variant: PredictorChoice, h: usize, payload: f64, controller: &ControllerConfig) -> Scenario {
    Scenario {
        name,
        plant: PlantSpec::QuadRoll {
            representation: PlantMode::Tf,
        },
        variant,
        added_delay: h,
        payload_fraction: payload,
        setpoint: None,
        disturbance: None,
        duration: EXPERIMENT_DURATION,
        window: None,
        metric: None,
        noise_std: 0.0,
        seed: 0,
        controller: *controller,
        instability: Default::default(),
    }
}

fn tag(kind: &str, variant: PredictorChoice, h: usize, payload: f64) -> String {
    if payload > 0.0 {
        format!("{kind}-{variant}-h{h}-p{:.0}", 100.0 * payload)
    } else {
        format!("{kind}-{variant}-h{h}")
    }
}

/// 15° roll doublet tracking, attitude metrics over 2 s.
pub fn tracking(variant: PredictorChoice, h: usize, payload: f64, controller: &ControllerConfig) -> Scenario {
    let mut s = base(tag("step", variant, h, payload), variant, h, payload, controller);
    s.setpoint = Some(DoubletSpec::attitude_default());
    s
}

/// Doublet disturbance at the controller output with zero setpoint,
/// rate metrics over the disturbance plus 1 s.
pub fn disturbance(variant: PredictorChoice, h: usize, payload: f64, injection: Injection, controller: &ControllerConfig) -> Scenario {
    let mut s = base(tag("dist", variant, h, payload), variant, h, payload, controller);
    s.disturbance = Some(DisturbanceSpec::new(DoubletSpec::with_amplitude(DISTURBANCE_AMPLITUDE), injection));
    s
}

pub const VARIANTS: [PredictorChoice; 3] = [PredictorChoice::None, PredictorChoice::Smith, PredictorChoice::State];
