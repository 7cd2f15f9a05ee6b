//! Grid search for Hex-Jet gains: 10° doublets on each axis, all variants,
//! no added delay. Prints the stable candidates with the lowest Smith RMSE.
//!
//!     cargo run --release --example tune_hexjet

use hexjet_core::bench::{run_scenario, ControllerConfig, DoubletSpec, ObserverConfig, PlantSpec, Scenario};
use hexjet_core::control::{PredictorChoice as P, RatePidGains};
use hexjet_core::par;
use hexjet_core::predictor::ObserverGain;

fn scenario(ctl: &ControllerConfig, variant: P, axis: usize) -> Scenario {
    Scenario {
        name: format!("hexjet-{variant}-axis{axis}"),
        plant: PlantSpec::HexJet {
            geometry: Default::default(),
            servo: Default::default(),
            axis,
        },
        variant,
        added_delay: 0,
        payload_fraction: 0.0,
        setpoint: Some(DoubletSpec::with_amplitude(10f64.to_radians())),
        disturbance: None,
        duration: 6.0,
        window: None,
        metric: None,
        noise_std: 0.0,
        seed: 0,
        controller: *ctl,
        instability: Default::default(),
    }
}

fn main() {
    let mut grid = Vec::new();
    for katt in [1.0, 2.0, 3.0, 4.0, 6.0] {
        for kp in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            for ki in [0.0, 0.5, 2.0] {
                for pole in [0.8, 0.9] {
                    grid.push(ControllerConfig {
                        attitude_gain: katt,
                        rate: RatePidGains {
                            kp,
                            ki,
                            kd: 0.0,
                            integrator_limit: 2.0,
                            output_limit: 20.0,
                            derivative_cutoff_hz: 30.0,
                        },
                        observer: ObserverConfig {
                            gain: ObserverGain::Poles { p1: pole, p2: pole },
                            input_gain: 1.0,
                        },
                        state_model: None,
                    });
                }
            }
        }
    }
    let results = par::map(&grid, |c| {
        let mut worst = 0.0f64;
        let mut smith = 0.0;
        let mut unstable = Vec::new();
        for v in [P::None, P::Smith, P::State] {
            for axis in 0..3 {
                match run_scenario(&scenario(c, v, axis)) {
                    Ok(r) if r.stable() => {
                        worst = worst.max(r.metrics().rmse);
                        if v == P::Smith && axis == 0 {
                            smith = r.metrics().rmse;
                        }
                    }
                    Ok(_) => unstable.push(format!("{v}{axis}")),
                    Err(e) => unstable.push(format!("{v}{axis}:{e}")),
                }
            }
        }
        (unstable, smith, worst)
    });
    let mut idx: Vec<usize> = (0..grid.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ra, rb) = (&results[a], &results[b]);
        (ra.0.len(), ra.2).partial_cmp(&(rb.0.len(), rb.2)).unwrap()
    });
    for &i in idx.iter().take(12) {
        let (c, r) = (&grid[i], &results[i]);
        let ObserverGain::Poles { p1, .. } = c.observer.gain else { unreachable!() };
        println!(
            "katt {} kp {} ki {} pole {} | smith roll {:.4} worst {:.4} unstable [{}]",
            c.attitude_gain,
            c.rate.kp,
            c.rate.ki,
            p1,
            r.1,
            r.2,
            r.0.join(",")
        );
    }
}
