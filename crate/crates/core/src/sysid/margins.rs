use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lti::freq::{logspace, unwrap};
use crate::lti::DelayedTransferFunction;

/// Stability margins of an open loop. Absent crossings are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginReport {
    /// Lowest 0 dB gain crossover (Hz).
    pub crossover_hz: Option<f64>,
    /// Lowest −180° phase crossing (Hz).
    pub phase_crossing_hz: Option<f64>,
    pub gain_margin_db: Option<f64>,
    pub phase_margin_deg: Option<f64>,
    /// Closed-loop −3 dB bandwidth of `L/(1+L)` (Hz).
    pub cutoff_hz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginOptions {
    pub f_min: f64,
    pub points: usize,
    /// Bisection tolerance (Hz).
    pub tolerance: f64,
}

impl Default for MarginOptions {
    fn default() -> Self {
        Self {
            f_min: 1e-3,
            points: 20_000,
            tolerance: 1e-7,
        }
    }
}

fn bisect(mut lo: f64, mut hi: f64, tol: f64, sign_lo: bool, f: impl Fn(f64) -> f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Margins of an arbitrary open loop `l(f)` on (0, nyquist].
pub fn margins_of(l: impl Fn(f64) -> Complex64, nyquist: f64, opts: &MarginOptions) -> Result<MarginReport> {
    if !(nyquist > opts.f_min) {
        return Err(Error::InvalidSpec(format!("nyquist {nyquist} Hz below grid start {}", opts.f_min)));
    }
    let grid = logspace(opts.f_min, nyquist, opts.points);
    let vals: Vec<Complex64> = grid.iter().map(|&f| l(f)).collect();
    if vals.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite("open-loop response"));
    }
    let mag: Vec<f64> = vals.iter().map(|v| v.norm()).collect();
    let phase = unwrap(&vals.iter().map(|v| v.arg()).collect::<Vec<_>>());

    // continuous unwrapped phase between grid points, anchored at grid node i
    let phase_at = |f: f64, i: usize| {
        let p = l(f).arg();
        let mut d = p - phase[i];
        let two_pi = 2.0 * std::f64::consts::PI;
        d -= two_pi * (d / two_pi).round();
        phase[i] + d
    };

    let mut crossover = None;
    for i in 0..grid.len() - 1 {
        let (a, b) = (mag[i] - 1.0, mag[i + 1] - 1.0);
        if a == 0.0 {
            crossover = Some((grid[i], i));
            break;
        }
        if a * b < 0.0 {
            let f = bisect(grid[i], grid[i + 1], opts.tolerance, a > 0.0, |f| l(f).norm() - 1.0);
            crossover = Some((f, i));
            break;
        }
    }

    let pi = std::f64::consts::PI;
    let mut phase_cross = None;
    for i in 0..grid.len() - 1 {
        let (a, b) = (phase[i] + pi, phase[i + 1] + pi);
        if a == 0.0 {
            phase_cross = Some(grid[i]);
            break;
        }
        if a * b < 0.0 {
            let f = bisect(grid[i], grid[i + 1], opts.tolerance, a > 0.0, |f| phase_at(f, i) + pi);
            phase_cross = Some(f);
            break;
        }
    }

    let phase_margin = crossover.map(|(f, i)| (phase_at(f, i) + pi).to_degrees());
    let gain_margin = phase_cross.map(|f| -20.0 * l(f).norm().log10());

    let t_mag = |f: f64| {
        let v = l(f);
        (v / (1.0 + v)).norm()
    };
    let t0 = t_mag(grid[0]);
    let target = t0 / 2f64.sqrt();
    let mut cutoff = None;
    for i in 0..grid.len() - 1 {
        let (a, b) = (t_mag(grid[i]) - target, t_mag(grid[i + 1]) - target);
        if a > 0.0 && b <= 0.0 {
            cutoff = Some(bisect(grid[i], grid[i + 1], opts.tolerance, true, |f| t_mag(f) - target));
            break;
        }
    }

    Ok(MarginReport {
        crossover_hz: crossover.map(|c| c.0),
        phase_crossing_hz: phase_cross,
        gain_margin_db: gain_margin,
        phase_margin_deg: phase_margin,
        cutoff_hz: cutoff,
    })
}

/// Margins of a transfer-function open loop.
pub fn open_loop_margins(l: &DelayedTransferFunction) -> Result<MarginReport> {
    open_loop_margins_with(l, &MarginOptions::default())
}

pub fn open_loop_margins_with(l: &DelayedTransferFunction, opts: &MarginOptions) -> Result<MarginReport> {
    margins_of(|f| l.evaluate_unchecked(f), l.nyquist(), opts)
}
