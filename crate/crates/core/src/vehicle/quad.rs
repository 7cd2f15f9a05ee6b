use serde::{Deserialize, Serialize};

use crate::lti::{DelayedTransferFunction, LinearStateSpace};
use crate::models;

/// Representation of the quadrotor roll-rate plant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlantMode {
    #[default]
    Tf,
    Ss,
}

#[derive(Debug, Clone)]
pub enum QuadRollPlant {
    Tf(DelayedTransferFunction),
    Ss(LinearStateSpace),
}

pub fn quad_roll_plant(mode: PlantMode) -> QuadRollPlant {
    match mode {
        PlantMode::Tf => QuadRollPlant::Tf(models::quad_roll_tf()),
        PlantMode::Ss => QuadRollPlant::Ss(models::quad_roll_ss()),
    }
}

/// Comparison of the published transfer function and state-space roll
/// models, which do not realize one another.
#[derive(Debug, Clone, PartialEq)]
pub struct RollModelDiscrepancy {
    pub steps: usize,
    pub max_abs_impulse_deviation: f64,
    pub tf_impulse_peak: f64,
    pub ss_impulse_peak: f64,
    pub tf_dc_gain: f64,
    pub ss_dc_gain: f64,
}

pub fn roll_model_discrepancy(steps: usize) -> RollModelDiscrepancy {
    let mut u = vec![0.0; steps];
    if steps > 0 {
        u[0] = 1.0;
    }
    let tf = models::quad_roll_tf();
    let ss = models::quad_roll_ss();
    let a = tf.simulate(&u).expect("finite input");
    let b = ss.simulate(&u).expect("finite input");
    let peak = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    RollModelDiscrepancy {
        steps,
        max_abs_impulse_deviation: a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        tf_impulse_peak: peak(&a),
        ss_impulse_peak: peak(&b),
        tf_dc_gain: tf.dc_gain().expect("stable model"),
        ss_dc_gain: ss.dc_gain().expect("stable model"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn modes_return_published_coefficients() {
        match quad_roll_plant(PlantMode::Tf) {
            QuadRollPlant::Tf(t) => assert_eq!(t.numerator(), &[-0.7549, 0.9393]),
            _ => panic!("expected tf"),
        }
        match quad_roll_plant(PlantMode::Ss) {
            QuadRollPlant::Ss(s) => assert_eq!(s.b().as_slice(), &[0.0, 0.0234]),
            _ => panic!("expected ss"),
        }
    }

    #[test]
    fn discrepancy_is_large() {
        let d = roll_model_discrepancy(400);
        // impulse of the tf model peaks near 1, the ss model near 0.02
        assert_relative_eq!(d.tf_dc_gain / d.ss_dc_gain, 3660.0, max_relative = 1e-3);
        assert!(d.max_abs_impulse_deviation > 0.5);
        assert!(d.ss_impulse_peak < 0.05);
    }
}
