//! Closed-loop Hex-Jet simulation: cascade controller, six delayed
//! turbojets, two tilt servos and the rigid body.

use nalgebra::Vector3;

use super::record::{ExperimentRecord, Trace};
use super::runner::{build_compensator, state_model_of, summarize, Envelope, Noise};
use super::scenario::{Injection, PlantSpec, Scenario, StateModelConfig};
use super::signals::doublet_at;
use crate::control::attitude::{angle_between, from_euler, to_euler};
use crate::control::{CascadeController, RateLoop};
use crate::control::AttitudeGains;
use crate::error::{Error, Result};
use crate::lti::{DelayLine, DelayedTransferFunction, LinearStateSpace};
use crate::models;
use crate::vehicle::actuators::normalized;
use crate::vehicle::{allocate, body_force, body_torque, step_dynamics, ActuatorBank, AllocationRequest, HexJetGeometry, ServoParams, VehicleState, GRAVITY};

/// Linearized single-axis rate models around hover: the rate loop
/// commands an angular acceleration, roll through the engines and pitch
/// and yaw through the tilt servos, followed by an integrator.
pub fn axis_models(servo: &ServoParams) -> Result<[DelayedTransferFunction; 3]> {
    let ts = models::HEXJET_TS;
    let integrator = DelayedTransferFunction::new(vec![ts], vec![1.0, -1.0], 0, ts)?;
    let roll = normalized(&models::g_turbo())?.series(&integrator)?;
    let k = ts / servo.time_constant;
    let lag = DelayedTransferFunction::new(vec![k, 0.0], vec![1.0, -(1.0 - k)], 0, ts)?;
    let tilt = lag.series(&integrator)?;
    Ok([roll, tilt.clone(), tilt])
}

/// Two-state models `[ω, ω̇]` matching [`axis_models`], for the state
/// predictor.
pub fn axis_state_models(servo: &ServoParams) -> Result<[StateModelConfig; 3]> {
    let ts = models::HEXJET_TS;
    let turbo = models::g_turbo();
    let p = -turbo.denominator()[1];
    let roll = LinearStateSpace::siso(&[&[1.0, ts], &[0.0, p]], &[0.0, 1.0 - p], &[1.0, 0.0], 0.0, 0, ts)?;
    let k = ts / servo.time_constant;
    let q = 1.0 - k;
    let tilt = LinearStateSpace::siso(&[&[1.0, q * ts], &[0.0, q]], &[k * ts, k], &[1.0, 0.0], 0.0, 0, ts)?;
    Ok([state_model_of(&roll)?, state_model_of(&tilt)?, state_model_of(&tilt)?])
}

pub(crate) fn run_hexjet(scenario: &Scenario) -> Result<ExperimentRecord> {
    let PlantSpec::HexJet { geometry, servo, axis } = &scenario.plant else {
        return Err(Error::InvalidSpec("not a Hex-Jet scenario".into()));
    };
    let axis = *axis;
    let ts = models::HEXJET_TS;
    let n = (scenario.duration / ts).round() as usize;
    let h = scenario.added_delay;
    let nominal_geom: HexJetGeometry = *geometry;
    let plant_geom = geometry.with_payload(scenario.payload_fraction);
    let j_nom = nominal_geom.inertia_matrix();

    let nominals = axis_models(servo)?;
    let states = axis_state_models(servo)?;
    let mk = |i: usize| -> Result<RateLoop> {
        let sm = scenario.controller.state_model.unwrap_or(states[i]);
        let comp = build_compensator(scenario.variant, &nominals[i], h, &sm, scenario)?;
        RateLoop::new(scenario.controller.rate, comp, ts)
    };
    let mut controller = CascadeController::new(AttitudeGains::uniform(scenario.controller.attitude_gain)?, [mk(0)?, mk(1)?, mk(2)?]);

    let mut actuators = ActuatorBank::new(&normalized(&models::g_turbo())?, *servo, &plant_geom)?;
    actuators.trim([nominal_geom.hover_thrust_per_engine() / nominal_geom.max_thrust; 6], 0.0, 0.0);
    let mut line: DelayLine<Vector3<f64>> = DelayLine::new(h, Vector3::zeros());
    let mut noise = Noise::new(scenario.noise_std, scenario.seed)?;
    let mut envelope = Envelope::new(scenario.instability);
    let bound = scenario.instability.divergence_bound;
    let mut state = VehicleState::default();
    let mut trace = Trace::with_capacity(n);
    let mut truncated_at = None;

    for k in 0..n {
        let t = k as f64 * ts;
        if !state.is_finite() || state.rates.amax() > bound || state.velocity.amax() > bound {
            truncated_at = Some(t);
            break;
        }
        let measured = state.rates + Vector3::new(noise.sample(), noise.sample(), noise.sample());
        let mut euler_sp = [0.0; 3];
        euler_sp[axis] = scenario.setpoint.as_ref().map_or(0.0, |d| doublet_at(d, k, ts));
        let q_sp = from_euler(euler_sp[0], euler_sp[1], euler_sp[2]);
        let out = controller.step(&q_sp, &state.attitude, &measured)?;
        let mut dist = Vector3::zeros();
        dist[axis] = scenario.disturbance.as_ref().map_or(0.0, |d| doublet_at(&d.doublet(), k, ts));
        let injection = scenario.disturbance.as_ref().map_or(Injection::ControllerOutput, |d| d.injection);
        let accel = match injection {
            Injection::ControllerOutput => line.push(out.command + dist),
            Injection::PlantInput => line.push(out.command) + dist,
        };

        let r = state.rotation();
        let tilt_cos = r[(2, 2)].clamp(0.5, 1.0);
        let req = AllocationRequest {
            thrust: nominal_geom.mass * GRAVITY / tilt_cos,
            torque: j_nom * accel,
        };
        let alloc = allocate(&nominal_geom, &req);
        let thrust = actuators.step_grouped(alloc.throttle_left, alloc.throttle_right, alloc.alpha1, alloc.alpha2)?;
        let force = body_force(&thrust, &plant_geom)?;
        let torque = body_torque(&thrust, &plant_geom)?;

        let euler = to_euler(&state.attitude);
        trace.push(
            t,
            euler_sp[axis],
            euler[axis],
            out.rate_setpoint[axis],
            state.rates[axis],
            out.feedback[axis],
            out.command[axis],
            dist[axis],
        );
        envelope.observe(t, state.rates.norm(), angle_between(&q_sp, &state.attitude));
        state = match step_dynamics(&state, &plant_geom, &force, &torque, ts) {
            Ok(s) => s,
            Err(Error::Diverged { .. }) => {
                truncated_at = Some(t + ts);
                break;
            }
            Err(e) => return Err(e),
        };
    }
    let unstable = envelope.fired_at.or(truncated_at).is_some();
    let metrics = summarize(scenario, &trace, !unstable);
    Ok(ExperimentRecord::new(scenario, metrics, envelope.fired_at, truncated_at, trace))
}
