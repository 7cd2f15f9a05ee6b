//! Acceptance criteria, one test each. Every test prints a single
//! `PASS`/`FAIL` line with the measured values before asserting.

use std::time::{Duration, Instant};

use hexjet_core::bench::experiments::{disturbance, quad_default_controller, tracking};
use hexjet_core::bench::{run_matrix, Injection, Metrics, Scenario};
use hexjet_core::control::{Compensator, PredictorChoice as P, RateLoop};
use hexjet_core::lti::{DelayLine, DelayedTransferFunction, SsState, TfState};
use hexjet_core::models;
use hexjet_core::par;
use hexjet_core::predictor::{SmithPredictor, StatePredictor};
use hexjet_core::sysid::{identify, open_loop_margins, IdentifySpec};
use hexjet_core::vehicle::forces::{force_by_summation, force_closed_form, torque_by_summation, torque_closed_form};
use hexjet_core::vehicle::{allocate, body_force, body_torque, step_dynamics, AllocationRequest, HexJetGeometry, ThrustState, VehicleState};
use nalgebra::{Quaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: u32, title: &str, pass: bool, elapsed: Duration, limit: Duration, detail: String) {
    let in_time = elapsed < limit;
    let ok = pass && in_time;
    println!(
        "{} criterion {n} ({title}): {detail}; runtime {:.3} ms (limit {:.0} ms)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64() * 1e3,
        limit.as_secs_f64() * 1e3
    );
    assert!(pass, "criterion {n} failed: {detail}");
    assert!(in_time, "criterion {n} over its runtime limit");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn criterion_01_time_constants() {
    let t0 = Instant::now();
    let turbo = models::g_turbo().dominant_time_constant().unwrap();
    let edf = models::g_edf().dominant_time_constant().unwrap();
    let elapsed = t0.elapsed();
    let (e1, e2) = (rel(turbo, 0.33), rel(edf, 0.029));
    verdict(
        1,
        "time constants",
        e1 <= 0.01 && e2 <= 0.03,
        elapsed,
        Duration::from_millis(1),
        format!(
            "tau_turbo {turbo:.5} s ({:.2}% from 0.33, tol 1%), tau_edf {edf:.5} s ({:.2}% from 0.029, tol 3%)",
            100.0 * e1,
            100.0 * e2
        ),
    );
}

/// Rate response to a unit setpoint with `h` samples between controller
/// and plant.
fn rate_loop_response(comp: Compensator, h: usize, n: usize) -> Vec<f64> {
    let plant = models::quad_roll_tf();
    let mut state = TfState::new(&plant);
    let mut line = DelayLine::new(h, 0.0);
    let mut rl = RateLoop::new(quad_default_controller().rate, comp, models::QUAD_TS).unwrap();
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let y = state.peek_output();
        ys.push(y);
        let o = rl.step(1.0, y).unwrap();
        state.step(line.push(o.command)).unwrap();
    }
    ys
}

#[test]
fn criterion_02_smith_equivalence() {
    let t0 = Instant::now();
    let h = 25;
    let n = 2000;
    let free = rate_loop_response(Compensator::None, 0, n);
    let smith = SmithPredictor::new(&models::quad_roll_tf().with_delay(h));
    let delayed = rate_loop_response(Compensator::Smith(smith), h, n + h);
    let err = (0..n).map(|k| (delayed[k + h] - free[k]).abs()).fold(0.0, f64::max);
    let elapsed = t0.elapsed();
    verdict(
        2,
        "Smith equivalence",
        err < 1e-9 && free.iter().any(|v| v.abs() > 0.1),
        elapsed,
        Duration::from_secs(1),
        format!("max |y_smith(k+25) - y_free(k)| = {err:.3e} over {n} samples (tol 1e-9)"),
    );
}

fn prediction_error(d: usize, seed: u64, steps: usize) -> f64 {
    let model = models::quad_roll_ss();
    let delayed = model.with_delay(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: Vec<f64> = (0..steps + d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut plant = SsState::new(&delayed);
    let mut xs = Vec::with_capacity(u.len() + 1);
    for &v in &u {
        xs.push(plant.state().clone());
        plant.step_siso(v).unwrap();
    }
    xs.push(plant.state().clone());
    let mut p = StatePredictor::from_model(&model, d).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..steps {
        let xp = p.predict(&xs[k]).unwrap();
        worst = worst.max((xp - &xs[k + d]).amax());
        p.push_input(u[k]);
    }
    worst
}

#[test]
fn criterion_03_state_predictor_exactness() {
    let t0 = Instant::now();
    let cases: Vec<(usize, u64)> = [5usize, 10, 25].iter().flat_map(|&d| (0..1000u64).map(move |s| (d, s))).collect();
    let errs = par::map(&cases, |&(d, s)| prediction_error(d, 1000 * d as u64 + s, 100));
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    let elapsed = t0.elapsed();
    verdict(
        3,
        "state-predictor exactness",
        worst < 1e-12,
        elapsed,
        Duration::from_secs(10),
        format!("max prediction error {worst:.3e} over {} seeded sequences, d in {{5, 10, 25}} (tol 1e-12)", cases.len()),
    );
}

#[test]
fn criterion_04_sysid_round_trip() {
    let t0 = Instant::now();
    let plants: Vec<(&str, DelayedTransferFunction, usize, usize)> = vec![
        ("g_turbo", models::g_turbo(), 0, 1),
        ("g_edf", models::g_edf(), 0, 1),
        ("hexjet_roll", models::hexjet_roll(), 1, 2),
        ("quad_roll_tf", models::quad_roll_tf(), 1, 2),
    ];
    let fits = par::map(&plants, |(_, g, nn, nd)| identify(g, &IdentifySpec::for_plant(g, *nn, *nd, 40)).map(|(_, f)| f.model));
    let elapsed = t0.elapsed();
    let mut pass = true;
    let mut parts = Vec::new();
    for ((name, g, _, _), fit) in plants.iter().zip(fits) {
        let m = fit.unwrap();
        let coeff_err = g
            .numerator()
            .iter()
            .zip(m.numerator())
            .chain(g.denominator().iter().zip(m.denominator()))
            .map(|(a, b)| rel(*b, *a))
            .fold(0.0, f64::max);
        let shape_ok = m.numerator().len() == g.numerator().len() && m.denominator().len() == g.denominator().len();
        let ok = shape_ok && coeff_err <= 0.02 && m.delay_samples() == g.delay_samples();
        pass &= ok;
        parts.push(format!("{name} delay {} coeff err {:.3}%", m.delay_samples(), 100.0 * coeff_err));
    }
    verdict(4, "sysid round trip", pass, elapsed, Duration::from_secs(30), parts.join(", "));
}

fn metrics_of(scenarios: &[Scenario]) -> Vec<Metrics> {
    run_matrix(scenarios).into_iter().map(|r| r.unwrap().summary.metrics).collect()
}

#[test]
fn criterion_05_stability_regime() {
    let c = quad_default_controller();
    let t0 = Instant::now();
    let m = metrics_of(&[
        tracking(P::None, 5, 0.0, &c),
        tracking(P::None, 10, 0.0, &c),
        tracking(P::Smith, 25, 0.0, &c),
        tracking(P::State, 25, 0.0, &c),
    ]);
    let elapsed = t0.elapsed();
    let word = |s: bool| if s { "stable" } else { "unstable" };
    verdict(
        5,
        "stability regime",
        m[0].stable && !m[1].stable && m[2].stable && !m[3].stable,
        elapsed,
        Duration::from_secs(10),
        format!(
            "baseline h5 {}, baseline h10 {}, smith h25 {}, state h25 {}",
            word(m[0].stable),
            word(m[1].stable),
            word(m[2].stable),
            word(m[3].stable)
        ),
    );
}

#[test]
fn criterion_06_disturbance_ordering() {
    let c = quad_default_controller();
    let inj = Injection::ControllerOutput;
    let t0 = Instant::now();
    let m = metrics_of(&[
        disturbance(P::None, 5, 0.0, inj, &c),
        disturbance(P::Smith, 5, 0.0, inj, &c),
        disturbance(P::State, 5, 0.0, inj, &c),
        disturbance(P::None, 10, 0.0, inj, &c),
        disturbance(P::Smith, 10, 0.0, inj, &c),
        disturbance(P::State, 10, 0.0, inj, &c),
    ]);
    let elapsed = t0.elapsed();
    let (b5, s5, x5, b10, s10, x10) = (m[0], m[1], m[2], m[3], m[4], m[5]);
    let h5 = b5.stable && s5.stable && x5.stable && s5.rmse < x5.rmse && x5.rmse < b5.rmse && s5.mae < x5.mae && x5.mae < b5.mae;
    let h10 = !b10.stable && s10.stable && x10.stable && s10.rmse < x10.rmse;
    verdict(
        6,
        "disturbance ordering",
        h5 && h10,
        elapsed,
        Duration::from_secs(10),
        format!(
            "h5 RMSE smith {:.4} state {:.4} baseline {:.4}, MAE {:.4} {:.4} {:.4}; h10 baseline {}, RMSE smith {:.4} state {:.4}",
            s5.rmse,
            x5.rmse,
            b5.rmse,
            s5.mae,
            x5.mae,
            b5.mae,
            if b10.stable { "stable" } else { "unstable" },
            s10.rmse,
            x10.rmse
        ),
    );
}

#[test]
fn criterion_07_payload_robustness() {
    let c = quad_default_controller();
    let inj = Injection::ControllerOutput;
    let t0 = Instant::now();
    let m = metrics_of(&[
        disturbance(P::Smith, 10, 0.0, inj, &c),
        disturbance(P::Smith, 10, 0.4, inj, &c),
        disturbance(P::State, 5, 0.0, inj, &c),
        disturbance(P::State, 5, 0.4, inj, &c),
    ]);
    let elapsed = t0.elapsed();
    let all_stable = m.iter().all(|m| m.stable);
    let d_smith = 100.0 * (m[1].rmse / m[0].rmse - 1.0);
    let d_state = 100.0 * (m[3].rmse / m[2].rmse - 1.0);
    // the state predictor has to actually degrade for the comparison to mean anything
    let pass = all_stable && d_state > 0.0 && d_smith < d_state;
    verdict(
        7,
        "payload robustness",
        pass,
        elapsed,
        Duration::from_secs(10),
        format!(
            "smith h10 with 40% payload {}, RMSE change {d_smith:+.1}%; state h5 RMSE change {d_state:+.1}% (must be a degradation larger than smith's)",
            if m[1].stable { "stable" } else { "unstable" }
        ),
    );
}

#[test]
fn criterion_08_allocation_oracle() {
    let g = HexJetGeometry::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let t0 = Instant::now();
    let mut worst_force: f64 = 0.0;
    let mut worst_torque: f64 = 0.0;
    for _ in 0..10_000 {
        let fl = rng.gen_range(0.0..g.max_thrust);
        let fr = rng.gen_range(0.0..g.max_thrust);
        let a1 = rng.gen_range(-g.tilt_limit..g.tilt_limit);
        let a2 = rng.gen_range(-g.tilt_limit..g.tilt_limit);
        let s = ThrustState::grouped(fl, fr, a1, a2);
        worst_force = worst_force.max((force_closed_form(fl, fr, a1, a2) - force_by_summation(&s)).amax());
        worst_torque = worst_torque.max((torque_closed_form(&g, fl, fr, a1, a2) - torque_by_summation(&s, &g)).amax());
    }
    let mut worst_trip: f64 = 0.0;
    let mut checked = 0;
    while checked < 2000 {
        let req = AllocationRequest {
            thrust: rng.gen_range(40.0..80.0),
            torque: Vector3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0)),
        };
        let a = allocate(&g, &req);
        let limit = 15f64.to_radians();
        if a.saturated || a.alpha1.abs() >= limit || a.alpha2.abs() >= limit {
            continue;
        }
        let s = ThrustState::grouped(a.thrust_left(&g), a.thrust_right(&g), a.alpha1, a.alpha2);
        let f = body_force(&s, &g).unwrap();
        let t = body_torque(&s, &g).unwrap();
        let scale = req.torque.norm().max(1e-3);
        worst_trip = worst_trip.max(rel(f.z, req.thrust)).max((t - req.torque).norm() / scale);
        checked += 1;
    }
    let elapsed = t0.elapsed();
    verdict(
        8,
        "allocation oracle",
        worst_force < 1e-9 && worst_torque < 1e-9 && worst_trip <= 0.02,
        elapsed,
        Duration::from_secs(5),
        format!(
            "closed form vs summation: force {worst_force:.2e} N, torque {worst_torque:.2e} N m (tol 1e-9); allocation round trip worst {:.3}% over {checked} requests (tol 2%)",
            100.0 * worst_trip
        ),
    );
}

#[test]
fn criterion_09_rigid_body_conservation() {
    let g = HexJetGeometry::default();
    let j = g.inertia_matrix();
    let t0 = Instant::now();
    let mut s = VehicleState {
        attitude: Quaternion::new(1.0, 0.0, 0.0, 0.0),
        rates: Vector3::new(1.2, -0.7, 0.5),
        velocity: Vector3::zeros(),
        position: Vector3::zeros(),
    };
    let (e0, l0) = (s.kinetic_energy(&j), s.angular_momentum(&j));
    let (mut de, mut dl): (f64, f64) = (0.0, 0.0);
    for _ in 0..2500 {
        s = step_dynamics(&s, &g, &Vector3::zeros(), &Vector3::zeros(), 0.004).unwrap();
        de = de.max(rel(s.kinetic_energy(&j), e0));
        dl = dl.max(rel(s.angular_momentum(&j), l0));
    }
    let elapsed = t0.elapsed();
    verdict(
        9,
        "rigid-body conservation",
        de < 1e-6 && dl < 1e-6,
        elapsed,
        Duration::from_secs(1),
        format!("max relative drift over 10 s: energy {de:.2e}, |L| {dl:.2e} (tol 1e-6)"),
    );
}

#[test]
fn criterion_10_margin_sanity() {
    let ts = 0.004;
    let t0 = Instant::now();
    let unit = open_loop_margins(&DelayedTransferFunction::pure_delay(25, ts).unwrap()).unwrap();
    let half = open_loop_margins(&DelayedTransferFunction::pure_delay(25, ts).unwrap().scaled(0.5)).unwrap();
    let elapsed = t0.elapsed();
    let crossing = unit.phase_crossing_hz.unwrap_or(f64::NAN);
    let gm = half.gain_margin_db.unwrap_or(f64::NAN);
    verdict(
        10,
        "margin sanity",
        (crossing - 2.5).abs() <= 0.01 && (gm - 6.02).abs() <= 0.01,
        elapsed,
        Duration::from_secs(1),
        format!("z^-25 at Ts 0.004: -180 deg crossing {crossing:.4} Hz (target 2.5 +- 0.01); 0.5 z^-25 gain margin {gm:.4} dB (target 6.02 +- 0.01)"),
    );
}
