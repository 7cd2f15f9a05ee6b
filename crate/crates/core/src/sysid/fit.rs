use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectral::DEFAULT_COHERENCE_THRESHOLD;
use crate::error::{Error, Result};
use crate::lti::{DelayedTransferFunction, FrequencyResponse};

/// Per-bin weight in the output-error objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Uniform,
    /// `1/|Ĝ|²`, i.e. relative error. Keeps slow high-gain bins from
    /// dominating.
    #[default]
    InverseMagnitude,
}

/// Model structure and search settings for [`fit_delayed_tf`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub num_order: usize,
    pub den_order: usize,
    pub h_min: usize,
    pub h_max: usize,
    #[serde(default)]
    pub weighting: Weighting,
    #[serde(default = "default_threshold")]
    pub coherence_threshold: f64,
    /// Only bins inside this band (Hz) are used, when set.
    #[serde(default)]
    pub band: Option<(f64, f64)>,
    #[serde(default = "default_sk")]
    pub sk_iterations: usize,
}

fn default_threshold() -> f64 {
    DEFAULT_COHERENCE_THRESHOLD
}

fn default_sk() -> usize {
    3
}

impl FitSpec {
    pub fn new(num_order: usize, den_order: usize, h_min: usize, h_max: usize) -> Self {
        Self {
            num_order,
            den_order,
            h_min,
            h_max,
            weighting: Weighting::default(),
            coherence_threshold: default_threshold(),
            band: None,
            sk_iterations: default_sk(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.h_min > self.h_max {
            return Err(Error::InvalidSpec(format!("h_min {} > h_max {}", self.h_min, self.h_max)));
        }
        if self.num_order > self.den_order {
            return Err(Error::InvalidSpec("numerator order exceeds denominator order".into()));
        }
        Ok(())
    }

    fn parameters(&self) -> usize {
        self.num_order + 1 + self.den_order
    }
}

/// Outcome of a delayed transfer-function fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: DelayedTransferFunction,
    /// Weighted output-error residual of the chosen model.
    pub residual: f64,
    pub poles: Vec<Complex64>,
    pub stable: bool,
    /// Residual per candidate delay, in increasing delay order.
    pub candidates: Vec<(usize, f64)>,
    pub bins_used: usize,
}

struct Bins {
    f: Vec<f64>,
    g: Vec<Complex64>,
    w: Vec<f64>,
}

fn usable_bins(fr: &FrequencyResponse, spec: &FitSpec) -> Bins {
    let coh = fr.coherence();
    let mut out = Bins {
        f: Vec::new(),
        g: Vec::new(),
        w: Vec::new(),
    };
    for (i, (&f, &g)) in fr.frequencies().iter().zip(fr.gains()).enumerate() {
        if let Some(c) = coh {
            if c[i] < spec.coherence_threshold {
                continue;
            }
        }
        if let Some((lo, hi)) = spec.band {
            if f < lo || f > hi {
                continue;
            }
        }
        if !(g.re.is_finite() && g.im.is_finite()) || g.norm() == 0.0 {
            continue;
        }
        let w = match spec.weighting {
            Weighting::Uniform => 1.0,
            Weighting::InverseMagnitude => 1.0 / g.norm_sqr(),
        };
        out.f.push(f);
        out.g.push(g);
        out.w.push(w);
    }
    out
}

/// Coefficients of one candidate in z^-1 form: numerator b (descending z
/// powers of N) and denominator tail a (D = 1 + a1 z^-1 + ...).
fn fit_fixed_delay(bins: &Bins, spec: &FitSpec, ts: f64, h: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (nn, nd) = (spec.num_order, spec.den_order);
    let lag = (h + nd - nn) as f64;
    let rows = bins.f.len();
    let cols = nd + nn + 1;
    let q: Vec<Complex64> = bins
        .f
        .iter()
        .map(|&f| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * ts))
        .collect();
    let gt: Vec<Complex64> = bins
        .f
        .iter()
        .zip(&bins.g)
        .map(|(&f, &g)| g * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f * ts * lag))
        .collect();
    let mut a = vec![0.0; nd];
    let mut b = vec![0.0; nn + 1];
    for pass in 0..=spec.sk_iterations {
        let mut m = DMatrix::<f64>::zeros(2 * rows, cols);
        let mut rhs = DVector::<f64>::zeros(2 * rows);
        for r in 0..rows {
            let den_prev: Complex64 = if pass == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                1.0 + a.iter().enumerate().map(|(i, &ai)| ai * q[r].powi(i as i32 + 1)).sum::<Complex64>()
            };
            let s = bins.w[r].sqrt() / den_prev.norm().max(1e-300);
            // G̃ D(q) = N(q)  →  Σ b_i q^i − G̃ Σ a_i q^i = G̃
            for i in 0..nd {
                let v = -gt[r] * q[r].powi(i as i32 + 1) * s;
                m[(2 * r, i)] = v.re;
                m[(2 * r + 1, i)] = v.im;
            }
            for i in 0..=nn {
                let v = q[r].powi(i as i32) * s;
                m[(2 * r, nd + i)] = v.re;
                m[(2 * r + 1, nd + i)] = v.im;
            }
            let v = gt[r] * s;
            rhs[2 * r] = v.re;
            rhs[2 * r + 1] = v.im;
        }
        let svd = m.svd(true, true);
        let sv = &svd.singular_values;
        let smax = sv.max();
        if !(smax > 0.0) || sv.min() <= smax * 1e-13 {
            return Err(Error::RankDeficient);
        }
        let x = svd.solve(&rhs, 0.0).map_err(|_| Error::RankDeficient)?;
        a = (0..nd).map(|i| x[i]).collect();
        b = (0..=nn).map(|i| x[nd + i]).collect();
    }
    Ok((b, a))
}

fn output_error(bins: &Bins, tf: &DelayedTransferFunction) -> f64 {
    bins.f
        .iter()
        .zip(&bins.g)
        .zip(&bins.w)
        .map(|((&f, &g), &w)| w * (g - tf.evaluate_unchecked(f)).norm_sqr())
        .sum()
}

/// Fits `N(z)/D(z) z^-h` to a frequency response by Levy's linearized least
/// squares followed by Sanathanan–Koerner reweighting, for every integer
/// delay in the search range. The delay with the smallest weighted output
/// error wins; ties go to the smaller delay.
pub fn fit_delayed_tf(fr: &FrequencyResponse, spec: &FitSpec, sample_time: f64) -> Result<FitResult> {
    spec.validate()?;
    let bins = usable_bins(fr, spec);
    if bins.f.is_empty() {
        return Err(Error::EmptyCoherentSet);
    }
    if bins.f.len() < 2 * spec.parameters() {
        return Err(Error::InvalidSpec(format!(
            "{} usable bins, need at least {}",
            bins.f.len(),
            2 * spec.parameters()
        )));
    }
    let delays: Vec<usize> = (spec.h_min..=spec.h_max).collect();
    let fits = crate::par::map(&delays, |&h| -> Result<(usize, DelayedTransferFunction, f64)> {
        let (b, a) = fit_fixed_delay(&bins, spec, sample_time, h)?;
        let mut den = vec![1.0];
        den.extend(a);
        let tf = DelayedTransferFunction::new(b, den, h, sample_time)?;
        let err = output_error(&bins, &tf);
        Ok((h, tf, err))
    });
    let mut best: Option<(usize, DelayedTransferFunction, f64)> = None;
    let mut candidates = Vec::with_capacity(fits.len());
    let mut first_err = None;
    for fit in fits {
        match fit {
            Ok((h, tf, err)) => {
                candidates.push((h, err));
                let better = match &best {
                    None => true,
                    Some((_, _, e)) => err < *e,
                };
                if better && err.is_finite() {
                    best = Some((h, tf, err));
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let (_, model, residual) = match best {
        Some(b) => b,
        None => return Err(first_err.unwrap_or(Error::RankDeficient)),
    };
    let poles = model.poles();
    let stable = poles.iter().all(|p| p.norm() < 1.0);
    Ok(FitResult {
        model,
        residual,
        poles,
        stable,
        candidates,
        bins_used: bins.f.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::freq::logspace;
    use crate::models;

    fn exact_response(g: &DelayedTransferFunction) -> FrequencyResponse {
        let f = logspace(0.05, 0.8 * g.nyquist(), 300);
        g.frequency_response(&f).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn recovers_edf_without_delay() {
        let g = models::g_edf();
        let r = fit_delayed_tf(&exact_response(&g), &FitSpec::new(0, 1, 0, 0), g.sample_time()).unwrap();
        assert_eq!(r.model.delay_samples(), 0);
        assert!(rel(r.model.numerator()[0], 0.2554) < 0.01);
        assert!(rel(r.model.denominator()[1], -0.8748) < 0.01);
    }

    #[test]
    fn recovers_turbo_delay() {
        let g = models::g_turbo();
        let r = fit_delayed_tf(&exact_response(&g), &FitSpec::new(0, 1, 0, 50), g.sample_time()).unwrap();
        assert_eq!(r.model.delay_samples(), 25);
        assert!(rel(r.poles[0].re, 0.9879) < 0.01);
        assert_eq!(r.candidates.len(), 51);
        assert!(r.stable);
    }

    #[test]
    fn recovers_roll_model() {
        let g = models::hexjet_roll();
        let r = fit_delayed_tf(&exact_response(&g), &FitSpec::new(1, 2, 0, 50), g.sample_time()).unwrap();
        assert_eq!(r.model.delay_samples(), 25);
        let mut p: Vec<f64> = r.poles.iter().map(|p| p.re).collect();
        p.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!(rel(p[0], 0.9999) < 0.02 && rel(p[1], 0.9024) < 0.02);
    }

    #[test]
    fn recovers_quad_nonminimum_phase_model() {
        let g = models::quad_roll_tf();
        let r = fit_delayed_tf(&exact_response(&g), &FitSpec::new(1, 2, 0, 10), g.sample_time()).unwrap();
        assert_eq!(r.model.delay_samples(), 0);
        for (got, want) in r.model.numerator().iter().zip(g.numerator()) {
            assert!(rel(*got, *want) < 1e-6);
        }
    }

    #[test]
    fn errors() {
        let g = models::g_edf();
        let fr = exact_response(&g).with_coherence(vec![0.1; 300]).unwrap();
        assert!(matches!(fit_delayed_tf(&fr, &FitSpec::new(0, 1, 0, 0), 0.004), Err(Error::EmptyCoherentSet)));
        assert!(fit_delayed_tf(&exact_response(&g), &FitSpec::new(0, 1, 5, 2), 0.004).is_err());
        let tiny = FrequencyResponse::new(vec![1.0], vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert!(fit_delayed_tf(&tiny, &FitSpec::new(0, 1, 0, 0), 0.004).is_err());
    }

    #[test]
    fn tie_breaks_to_smallest_delay() {
        // a static gain has the same fit quality for every delay only if
        // the response is delay-free; check that h = 0 is chosen
        let g = DelayedTransferFunction::gain(3.0, 0.004).unwrap();
        let r = fit_delayed_tf(&exact_response(&g), &FitSpec::new(0, 0, 0, 5), 0.004).unwrap();
        assert_eq!(r.model.delay_samples(), 0);
    }
}
