use serde::{Deserialize, Serialize};

/// `sqrt(mean(e²))`; zero for an empty slice.
pub fn rmse(e: &[f64]) -> f64 {
    if e.is_empty() {
        return 0.0;
    }
    (e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64).sqrt()
}

/// Maximum absolute error `max|e|`.
pub fn mae(e: &[f64]) -> f64 {
    e.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Peak excursion beyond the final value `step`, in percent of `|step|`,
/// measured in the direction of the step. Zero when the response never
/// passes the target; `None` for a zero step.
pub fn overshoot_percent(response: &[f64], step: f64) -> Option<f64> {
    if step == 0.0 {
        return None;
    }
    let peak = response.iter().map(|y| (y - step) * step.signum()).fold(0.0, f64::max);
    Some(100.0 * peak / step.abs())
}

/// Settling time: the last time `|response − step|` exceeds 5% of `|step|`,
/// relative to `time[0]`. `Some(0)` when the response starts settled,
/// `None` for a zero step or when the last sample is still outside the band.
pub fn settling_time(time: &[f64], response: &[f64], step: f64) -> Option<f64> {
    if step == 0.0 || time.is_empty() {
        return None;
    }
    let band = 0.05 * step.abs();
    let last = response.iter().rposition(|y| (y - step).abs() > band);
    match last {
        None => Some(0.0),
        Some(i) if i + 1 == response.len() => None,
        Some(i) => Some(time[i + 1] - time[0]),
    }
}

/// Summary metrics of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse: f64,
    pub mae: f64,
    pub overshoot_percent: Option<f64>,
    pub settling_time: Option<f64>,
    pub stable: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_relative_eq!(rmse(&[3.0, -4.0]), 12.5f64.sqrt());
        assert_eq!(mae(&[0.5, -2.0, 1.0]), 2.0);
        assert_eq!(rmse(&[]), 0.0);
        assert_eq!(mae(&[]), 0.0);
    }

    #[test]
    fn first_order_settles_in_three_tau() {
        let (tau, dt) = (0.1, 0.001);
        let time: Vec<f64> = (0..2000).map(|k| k as f64 * dt).collect();
        let y: Vec<f64> = time.iter().map(|t| 1.0 - (-t / tau).exp()).collect();
        let ts = settling_time(&time, &y, 1.0).unwrap();
        assert!((ts - 3.0 * tau).abs() <= dt, "settling {ts}");
        assert_eq!(overshoot_percent(&y, 1.0), Some(0.0));
    }

    #[test]
    fn overshoot_of_underdamped_response() {
        let y = [0.0, 0.8, 1.25, 0.95, 1.0];
        assert_relative_eq!(overshoot_percent(&y, 1.0).unwrap(), 25.0, epsilon = 1e-12);
        let y: Vec<f64> = y.iter().map(|v| -2.0 * v).collect();
        assert_relative_eq!(overshoot_percent(&y, -2.0).unwrap(), 25.0, epsilon = 1e-12);
        assert_eq!(overshoot_percent(&y, 0.0), None);
    }

    #[test]
    fn unsettled_response() {
        assert_eq!(settling_time(&[0.0, 1.0], &[0.0, 0.0], 1.0), None);
    }

    proptest! {
        #[test]
        fn constant_error(c in -10.0f64..10.0, n in 1usize..200) {
            let e = vec![c; n];
            prop_assert!((rmse(&e) - c.abs()).abs() <= 1e-12 * c.abs().max(1.0));
            prop_assert_eq!(mae(&e), c.abs());
        }
    }
}
