use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lti::FrequencyResponse;

pub const DEFAULT_COHERENCE_THRESHOLD: f64 = 0.6;

/// Welch cross-spectral estimator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSpec {
    pub sample_time: f64,
    /// Segment length in samples.
    #[serde(default = "default_nperseg")]
    pub nperseg: usize,
    /// Segment overlap as a fraction of `nperseg`.
    #[serde(default = "default_overlap")]
    pub overlap: f64,
}

fn default_nperseg() -> usize {
    1024
}

fn default_overlap() -> f64 {
    0.5
}

impl EstimateSpec {
    pub fn new(sample_time: f64) -> Self {
        Self {
            sample_time,
            nperseg: default_nperseg(),
            overlap: default_overlap(),
        }
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
        .collect()
}

/// `Ĝ = S_uy / S_uu` from Hann-windowed overlapping segments, with the
/// magnitude-squared coherence `|S_uy|² / (S_uu S_yy)` per bin. Bins run
/// from the first non-zero frequency up to Nyquist.
pub fn estimate_frequency_response(input: &[f64], output: &[f64], spec: &EstimateSpec) -> Result<FrequencyResponse> {
    if input.len() != output.len() {
        return Err(Error::LengthMismatch(input.len(), output.len()));
    }
    let n = spec.nperseg;
    if n < 8 || !(0.0..1.0).contains(&spec.overlap) || !(spec.sample_time > 0.0) {
        return Err(Error::InvalidSpec(format!("invalid estimator settings {spec:?}")));
    }
    if input.len() < 4 * n {
        return Err(Error::InvalidSpec(format!(
            "need at least {} samples for segments of {n}, got {}",
            4 * n,
            input.len()
        )));
    }
    if input.iter().chain(output).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sweep record"));
    }
    if input.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroInput);
    }
    let step = ((1.0 - spec.overlap) * n as f64).round().max(1.0) as usize;
    let window = hann(n);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let bins = n / 2;
    let mut suu = vec![0.0; bins];
    let mut syy = vec![0.0; bins];
    let mut suy = vec![Complex64::new(0.0, 0.0); bins];
    let mut bu = vec![Complex64::new(0.0, 0.0); n];
    let mut by = vec![Complex64::new(0.0, 0.0); n];
    let mut start = 0;
    while start + n <= input.len() {
        for i in 0..n {
            bu[i] = Complex64::new(input[start + i] * window[i], 0.0);
            by[i] = Complex64::new(output[start + i] * window[i], 0.0);
        }
        fft.process(&mut bu);
        fft.process(&mut by);
        for k in 0..bins {
            let (u, y) = (bu[k + 1], by[k + 1]);
            suu[k] += u.norm_sqr();
            syy[k] += y.norm_sqr();
            suy[k] += u.conj() * y;
        }
        start += step;
    }
    let df = 1.0 / (n as f64 * spec.sample_time);
    let freqs: Vec<f64> = (1..=bins).map(|k| k as f64 * df).collect();
    let mut gains = Vec::with_capacity(bins);
    let mut coh = Vec::with_capacity(bins);
    for k in 0..bins {
        if suu[k] > 0.0 {
            gains.push(suy[k] / suu[k]);
            coh.push(if syy[k] > 0.0 { (suy[k].norm_sqr() / (suu[k] * syy[k])).min(1.0) } else { 0.0 });
        } else {
            gains.push(Complex64::new(0.0, 0.0));
            coh.push(0.0);
        }
    }
    FrequencyResponse::new(freqs, gains)?.with_coherence(coh)
}
