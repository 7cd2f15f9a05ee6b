//! Frequency-domain identification: chirp excitation, Welch estimation,
//! delayed low-order fitting, model refinement and open-loop margins.

pub mod fit;
pub mod log;
pub mod margins;
pub mod spectral;
pub mod sweep;

pub use fit::{fit_delayed_tf, FitResult, FitSpec, Weighting};
pub use log::SweepLog;
pub use margins::{margins_of, open_loop_margins, open_loop_margins_with, MarginOptions, MarginReport};
pub use spectral::{estimate_frequency_response, EstimateSpec, DEFAULT_COHERENCE_THRESHOLD};
pub use sweep::{generate_sweep, SweepSpec};

use crate::error::{Error, Result};
use crate::lti::{DelayedTransferFunction, FrequencyResponse};

/// Multiplies a measured response bin-wise by a correction transfer
/// function, e.g. the ratio of the full-scale to the scaled actuator model.
pub fn refine(fr: &FrequencyResponse, correction: &DelayedTransferFunction) -> Result<FrequencyResponse> {
    for &f in fr.frequencies() {
        correction.evaluate(f)?;
    }
    Ok(fr.multiply(|f| correction.evaluate_unchecked(f)))
}

/// Settings for the end-to-end identification pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentifySpec {
    pub sweep: SweepSpec,
    pub estimate: EstimateSpec,
    pub fit: FitSpec,
}

impl IdentifySpec {
    /// Defaults that recover the built-in plants from noiseless data:
    /// 0.1 Hz to 80% of Nyquist over 600 s, segments of 4096 samples. The
    /// fit keeps bins from 0.5 Hz to 90% of the top sweep frequency with
    /// coherence above 0.9, because the tapered ends of the chirp are
    /// poorly excited and bias the estimate there.
    pub fn for_plant(plant: &DelayedTransferFunction, num_order: usize, den_order: usize, h_max: usize) -> Self {
        let ts = plant.sample_time();
        let sweep = SweepSpec {
            f_start: 0.1,
            f_end: 0.8 * 0.5 / ts,
            duration: 600.0,
            amplitude: 1.0,
            sample_time: ts,
            taper_fraction: 0.02,
        };
        let mut fit = FitSpec::new(num_order, den_order, 0, h_max);
        fit.band = Some((0.5, 0.9 * sweep.f_end));
        fit.coherence_threshold = 0.9;
        let mut estimate = EstimateSpec::new(ts);
        estimate.nperseg = 4096;
        Self { sweep, estimate, fit }
    }
}

/// Drives `plant` with the chirp of `sweep` and logs input and output, the
/// output with seeded white noise of standard deviation `output_noise_std`.
pub fn record_sweep(plant: &DelayedTransferFunction, sweep: &SweepSpec, output_noise_std: f64, seed: u64) -> Result<SweepLog> {
    if (plant.sample_time() - sweep.sample_time).abs() > 1e-12 {
        return Err(Error::SampleTimeMismatch {
            left: plant.sample_time(),
            right: sweep.sample_time,
        });
    }
    if !(output_noise_std.is_finite() && output_noise_std >= 0.0) {
        return Err(Error::InvalidSpec(format!("output noise std must be >= 0, got {output_noise_std}")));
    }
    let u = generate_sweep(sweep)?;
    let mut y = plant.simulate(&u)?;
    let mut noise = crate::noise::Noise::new(output_noise_std, seed)?;
    for v in &mut y {
        *v += noise.sample();
    }
    SweepLog::new(sweep.sample_time, u, y)
}

/// Sweep → simulate `plant` → estimate → fit.
pub fn identify(plant: &DelayedTransferFunction, spec: &IdentifySpec) -> Result<(FrequencyResponse, FitResult)> {
    let u = generate_sweep(&spec.sweep)?;
    let y = plant.simulate(&u)?;
    let fr = estimate_frequency_response(&u, &y, &spec.estimate)?;
    let fit = fit_delayed_tf(&fr, &spec.fit, plant.sample_time())?;
    Ok((fr, fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn recorded_sweep_is_seeded() {
        let g = models::g_edf();
        let spec = IdentifySpec::for_plant(&g, 0, 1, 0).sweep;
        let quiet = record_sweep(&g, &spec, 0.0, 1).unwrap();
        assert_eq!(quiet.output, g.simulate(&quiet.input).unwrap());
        let a = record_sweep(&g, &spec, 0.1, 1).unwrap();
        assert_eq!(a.output, record_sweep(&g, &spec, 0.1, 1).unwrap().output);
        assert_ne!(a.output, record_sweep(&g, &spec, 0.1, 2).unwrap().output);
        let mut wrong = spec;
        wrong.sample_time = 0.0025;
        assert!(matches!(record_sweep(&g, &wrong, 0.0, 1), Err(Error::SampleTimeMismatch { .. })));
    }

    #[test]
    fn refine_multiplies_binwise() {
        let g = models::g_edf();
        let f = crate::lti::freq::logspace(0.1, 100.0, 50);
        let fr = g.frequency_response(&f).unwrap();
        let ratio = models::g_turbo().divide(&models::g_edf()).unwrap();
        let refined = refine(&fr, &ratio).unwrap();
        for (&fq, got) in f.iter().zip(refined.gains()) {
            let want = models::g_turbo().evaluate(fq).unwrap();
            assert!((got - want).norm() < 1e-9 * want.norm());
        }
    }
}
