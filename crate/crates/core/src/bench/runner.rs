use nalgebra::{DMatrix, DVector};

use super::metrics::{mae, overshoot_percent, rmse, settling_time, Metrics};
use super::record::{ExperimentRecord, Trace};
use super::scenario::{InstabilityCriteria, Injection, MetricSignal, PlantSpec, Scenario, StateModelConfig};
use super::signals::doublet_at;
use crate::control::{attitude_step, AttitudeGains, Compensator, PredictorChoice, RateLoop};
use crate::control::attitude::from_euler;
use crate::error::{Error, Result};
use crate::lti::{DelayLine, DelayedTransferFunction, LinearStateSpace, SsState, TfState};
use crate::models;
pub(crate) use crate::noise::Noise;
use crate::predictor::{LuenbergerObserver, SmithPredictor, StatePredictor};
use crate::vehicle::PlantMode;

/// Merges exceedances of the divergence limits into runs and reports the
/// first run that lasts long enough.
#[derive(Debug, Clone)]
pub(crate) struct Envelope {
    criteria: InstabilityCriteria,
    run: Option<(f64, f64)>,
    pub(crate) fired_at: Option<f64>,
}

impl Envelope {
    pub(crate) fn new(criteria: InstabilityCriteria) -> Self {
        Self {
            criteria,
            run: None,
            fired_at: None,
        }
    }

    pub(crate) fn observe(&mut self, t: f64, rate_magnitude: f64, attitude_error: f64) {
        if self.fired_at.is_some() {
            return;
        }
        let c = &self.criteria;
        let exceed = rate_magnitude > c.rate_limit || attitude_error.abs() > c.attitude_error_limit_deg.to_radians();
        if !exceed {
            return;
        }
        let (start, _) = match self.run {
            Some((s, last)) if t - last <= c.persistence + 1e-12 => (s, t),
            _ => (t, t),
        };
        self.run = Some((start, t));
        if t - start >= c.persistence - 1e-12 {
            self.fired_at = Some(t);
        }
    }
}

enum RatePlant {
    Tf(TfState),
    Ss(SsState),
}

impl RatePlant {
    fn peek(&self) -> f64 {
        match self {
            RatePlant::Tf(s) => s.peek_output(),
            RatePlant::Ss(s) => s.peek_output(),
        }
    }

    fn step(&mut self, u: f64) -> Result<()> {
        match self {
            RatePlant::Tf(s) => s.step(u).map(|_| ()),
            RatePlant::Ss(s) => s.step_siso(u).map(|_| ()),
        }
    }
}

/// Builds the rate-loop compensator for `choice` given the nominal
/// delay-free rate model, the delay it must bridge and the state model.
pub(crate) fn build_compensator(
    choice: PredictorChoice,
    nominal: &DelayedTransferFunction,
    delay: usize,
    state_model: &StateModelConfig,
    scenario: &Scenario,
) -> Result<Compensator> {
    Ok(match choice {
        PredictorChoice::None => Compensator::None,
        PredictorChoice::Smith => Compensator::Smith(SmithPredictor::new(&nominal.with_delay(nominal.delay_samples() + delay))),
        PredictorChoice::State => {
            let a = DMatrix::from_row_slice(2, 2, &[state_model.a[0][0], state_model.a[0][1], state_model.a[1][0], state_model.a[1][1]]);
            let b = DVector::from_row_slice(&state_model.b);
            let predictor = StatePredictor::new(&a, &b, nominal.delay_samples() + delay)?;
            let obs = &scenario.controller.observer;
            let observer = LuenbergerObserver::new(obs.gain, obs.input_gain, nominal.sample_time())?;
            Compensator::State { predictor, observer }
        }
    })
}

pub(crate) fn state_model_of(ss: &LinearStateSpace) -> Result<StateModelConfig> {
    if ss.states() != 2 {
        return Err(Error::DimensionMismatch(format!("state predictor model needs 2 states, got {}", ss.states())));
    }
    let (a, b) = (ss.a(), ss.b());
    Ok(StateModelConfig {
        a: [[a[(0, 0)], a[(0, 1)]], [a[(1, 0)], a[(1, 1)]]],
        b: [b[(0, 0)], b[(1, 0)]],
    })
}

/// Runs one experiment at the plant's sample time.
pub fn run_scenario(scenario: &Scenario) -> Result<ExperimentRecord> {
    scenario.validate()?;
    match &scenario.plant {
        PlantSpec::HexJet { .. } => super::hexjet::run_hexjet(scenario),
        PlantSpec::QuadRoll { representation } => {
            let (nominal, plant) = match representation {
                PlantMode::Tf => (models::quad_roll_tf(), RatePlant::Tf(TfState::new(&models::quad_roll_tf()))),
                PlantMode::Ss => {
                    let ss = models::quad_roll_ss();
                    (ss.to_tf()?, RatePlant::Ss(SsState::new(&ss)))
                }
            };
            let sm = match scenario.controller.state_model {
                Some(m) => m,
                None => state_model_of(&models::quad_roll_ss())?,
            };
            run_linear(scenario, &nominal, plant, &sm)
        }
        PlantSpec::Tf { model } => {
            let tf = model.to_tf()?;
            if tf.delay_samples() == 0 && tf.numerator().len() == tf.denominator().len() && tf.numerator()[0] != 0.0 {
                return Err(Error::InvalidSpec("rate plant must be strictly proper or delayed".into()));
            }
            let sm = match (scenario.controller.state_model, scenario.variant) {
                (Some(m), _) => m,
                (None, PredictorChoice::State) => {
                    return Err(Error::InvalidSpec(format!(
                        "scenario '{}': state predictor on a tf plant needs controller.state_model",
                        scenario.name
                    )))
                }
                (None, _) => StateModelConfig {
                    a: [[1.0, 0.0], [0.0, 1.0]],
                    b: [0.0, 0.0],
                },
            };
            let plant = RatePlant::Tf(TfState::new(&tf));
            run_linear(scenario, &tf, plant, &sm)
        }
    }
}

fn run_linear(scenario: &Scenario, nominal: &DelayedTransferFunction, mut plant: RatePlant, sm: &StateModelConfig) -> Result<ExperimentRecord> {
    let ts = nominal.sample_time();
    let n = (scenario.duration / ts).round() as usize;
    let h = scenario.added_delay;
    let comp = build_compensator(scenario.variant, nominal, h, sm, scenario)?;
    let mut rate_loop = RateLoop::new(scenario.controller.rate, comp, ts)?;
    let att_gains = AttitudeGains::uniform(scenario.controller.attitude_gain)?;
    let mut line = DelayLine::new(h, (0.0, 0.0));
    let input_gain = 1.0 / (1.0 + scenario.payload_fraction);
    let mut noise = Noise::new(scenario.noise_std, scenario.seed)?;
    let mut envelope = Envelope::new(scenario.instability);
    let bound = scenario.instability.divergence_bound;
    let mut trace = Trace::with_capacity(n);
    let mut attitude = 0.0f64;
    let mut truncated_at = None;

    for k in 0..n {
        let t = k as f64 * ts;
        let rate = plant.peek();
        if !(rate.is_finite() && rate.abs() <= bound && attitude.abs() <= bound) {
            truncated_at = Some(t);
            break;
        }
        let measured = rate + noise.sample();
        let att_sp = scenario.setpoint.as_ref().map_or(0.0, |d| doublet_at(d, k, ts));
        let rate_sp = attitude_step(&att_gains, &from_euler(att_sp, 0.0, 0.0), &from_euler(attitude, 0.0, 0.0))?[0];
        let out = rate_loop.step(rate_sp, measured)?;
        let dist = scenario.disturbance.as_ref().map_or(0.0, |d| doublet_at(&d.doublet(), k, ts));
        let injection = scenario.disturbance.as_ref().map_or(Injection::ControllerOutput, |d| d.injection);
        // the disturbance is an acceleration-equivalent input, so only the
        // control path sees the payload
        let (u, d) = line.push((out.command, dist));
        let d = match injection {
            Injection::ControllerOutput => d,
            Injection::PlantInput => dist,
        };
        trace.push(t, att_sp, attitude, rate_sp, rate, out.feedback, out.command, dist);
        envelope.observe(t, rate.abs(), att_sp - attitude);
        plant.step(input_gain * u + d)?;
        attitude += ts * rate;
    }
    let unstable_at = envelope.fired_at.or(truncated_at);
    let metrics = summarize(scenario, &trace, unstable_at.is_none());
    Ok(ExperimentRecord::new(scenario, metrics, envelope.fired_at, truncated_at, trace))
}

/// Metrics over the scenario window of a trace.
pub(crate) fn summarize(scenario: &Scenario, trace: &Trace, stable: bool) -> Metrics {
    let window = scenario.metric_window();
    let end = trace.time.iter().position(|&t| t >= window - 1e-9).unwrap_or(trace.len());
    let err: Vec<f64> = match scenario.metric_signal() {
        MetricSignal::Attitude => (0..end).map(|i| trace.attitude_setpoint[i] - trace.attitude[i]).collect(),
        MetricSignal::Rate => (0..end).map(|i| trace.rate_setpoint[i] - trace.rate[i]).collect(),
    };
    let (overshoot, settling) = match (&scenario.setpoint, scenario.metric_signal()) {
        (Some(d), MetricSignal::Attitude) => {
            let i0 = trace.time.iter().position(|&t| t >= d.start - 1e-9).unwrap_or(end);
            let i1 = trace
                .time
                .iter()
                .position(|&t| t >= d.start + d.positive_duration - 1e-9)
                .unwrap_or(trace.len())
                .min(trace.len());
            if i0 < i1 {
                (
                    overshoot_percent(&trace.attitude[i0..i1], d.amplitude),
                    settling_time(&trace.time[i0..i1], &trace.attitude[i0..i1], d.amplitude),
                )
            } else {
                (None, None)
            }
        }
        _ => (None, None),
    };
    Metrics {
        rmse: rmse(&err),
        mae: mae(&err),
        overshoot_percent: overshoot,
        settling_time: settling,
        stable,
    }
}
