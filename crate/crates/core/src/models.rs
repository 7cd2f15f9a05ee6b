//! Built-in plants identified on the Hex-Jet and the quadrotor test rig.

use crate::lti::{DelayedTransferFunction, LinearStateSpace};

/// Hex-Jet sample time (s).
pub const HEXJET_TS: f64 = 0.004;
/// Quadrotor rig sample time (s), 400 Hz.
pub const QUAD_TS: f64 = 0.0025;

fn tf(num: &[f64], den: &[f64], h: usize, ts: f64) -> DelayedTransferFunction {
    DelayedTransferFunction::new(num.to_vec(), den.to_vec(), h, ts).expect("built-in model is valid")
}

/// Turbojet thrust response: `0.01866 / (z - 0.9879) · z^-25`.
pub fn g_turbo() -> DelayedTransferFunction {
    tf(&[0.01866], &[1.0, -0.9879], 25, HEXJET_TS)
}

/// Electric ducted fan thrust response: `0.2554 / (z - 0.8748)`.
pub fn g_edf() -> DelayedTransferFunction {
    tf(&[0.2554], &[1.0, -0.8748], 0, HEXJET_TS)
}

/// Refined Hex-Jet roll channel:
/// `0.0689 (z + 1.4538) / ((z - 0.9999)(z - 0.9024)) · z^-25`.
pub fn hexjet_roll() -> DelayedTransferFunction {
    let num = crate::lti::poly::mul(&[0.0689], &[1.0, 1.4538]);
    let den = crate::lti::poly::from_real_roots(&[0.9999, 0.9024]);
    tf(&num, &den, 25, HEXJET_TS)
}

/// Quadrotor roll-rate transfer function used as the predictor model:
/// `(-0.7549 z + 0.9393) / (z² - 1.8770 z + 0.8786)`.
pub fn quad_roll_tf() -> DelayedTransferFunction {
    tf(&[-0.7549, 0.9393], &[1.0, -1.8770, 0.8786], 0, QUAD_TS)
}

/// Quadrotor roll state-space model as published, with the rate as the
/// measured output (`C = [1 0]`, `D = 0`).
pub fn quad_roll_ss() -> LinearStateSpace {
    LinearStateSpace::siso(
        &[&[0.9991, 0.0023], &[-0.6953, 0.8777]],
        &[0.0, 0.0234],
        &[1.0, 0.0],
        0.0,
        0,
        QUAD_TS,
    )
    .expect("built-in model is valid")
}

/// Named catalogue of the transfer-function plants.
pub fn catalogue() -> Vec<(&'static str, DelayedTransferFunction)> {
    vec![
        ("g_turbo", g_turbo()),
        ("g_edf", g_edf()),
        ("hexjet_roll", hexjet_roll()),
        ("quad_roll_tf", quad_roll_tf()),
    ]
}

pub fn by_name(name: &str) -> Option<DelayedTransferFunction> {
    catalogue().into_iter().find(|(n, _)| *n == name).map(|(_, t)| t)
}
