use num_complex::Complex64;
use crate::error::{Error, Result};

/// Complex gains sampled on a strictly increasing positive frequency grid
/// (Hz), optionally with per-bin coherence from spectral estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    frequencies: Vec<f64>,
    gains: Vec<Complex64>,
    coherence: Option<Vec<f64>>,
}

impl FrequencyResponse {
    pub fn new(frequencies: Vec<f64>, gains: Vec<Complex64>) -> Result<Self> {
        if frequencies.len() != gains.len() {
            return Err(Error::LengthMismatch(frequencies.len(), gains.len()));
        }
        if frequencies.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::InvalidSpec("frequencies must be finite and > 0".into()));
        }
        if frequencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec("frequencies must be strictly increasing".into()));
        }
        Ok(Self {
            frequencies,
            gains,
            coherence: None,
        })
    }

    /// Also checks every frequency is at most `nyquist`.
    pub fn with_nyquist(frequencies: Vec<f64>, gains: Vec<Complex64>, nyquist: f64) -> Result<Self> {
        if let Some(&f) = frequencies.iter().find(|&&f| f > nyquist * (1.0 + 1e-12)) {
            return Err(Error::FrequencyOutOfRange { frequency: f, nyquist });
        }
        Self::new(frequencies, gains)
    }

    pub fn with_coherence(mut self, coherence: Vec<f64>) -> Result<Self> {
        if coherence.len() != self.frequencies.len() {
            return Err(Error::LengthMismatch(self.frequencies.len(), coherence.len()));
        }
        self.coherence = Some(coherence);
        Ok(self)
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    pub fn coherence(&self) -> Option<&[f64]> {
        self.coherence.as_deref()
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn magnitude_db(&self) -> Vec<f64> {
        self.gains.iter().map(|g| 20.0 * g.norm().log10()).collect()
    }

    /// Phase in degrees, unwrapped along the grid.
    pub fn phase_deg_unwrapped(&self) -> Vec<f64> {
        unwrap(&self.gains.iter().map(|g| g.arg()).collect::<Vec<_>>())
            .into_iter()
            .map(f64::to_degrees)
            .collect()
    }

    /// Bins whose coherence is below `threshold` (none if no coherence).
    pub fn low_coherence(&self, threshold: f64) -> Vec<bool> {
        match &self.coherence {
            Some(c) => c.iter().map(|&v| v < threshold).collect(),
            None => vec![false; self.len()],
        }
    }

    /// Keeps the bins for which `keep` is true.
    pub fn select(&self, keep: &[bool]) -> Self {
        let pick = |v: &[f64]| v.iter().zip(keep).filter(|(_, &k)| k).map(|(x, _)| *x).collect::<Vec<_>>();
        Self {
            frequencies: pick(&self.frequencies),
            gains: self.gains.iter().zip(keep).filter(|(_, &k)| k).map(|(g, _)| *g).collect(),
            coherence: self.coherence.as_deref().map(pick),
        }
    }

    /// Bin-wise product with another response on the same grid.
    pub fn multiply(&self, other: impl Fn(f64) -> Complex64) -> Self {
        Self {
            gains: self.frequencies.iter().zip(&self.gains).map(|(&f, g)| g * other(f)).collect(),
            ..self.clone()
        }
    }
}

/// Removes 2π jumps from a phase sequence in radians.
pub fn unwrap(phase: &[f64]) -> Vec<f64> {
    use std::f64::consts::PI;
    let mut out = Vec::with_capacity(phase.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &p in phase {
        if let Some(q) = prev {
            let mut d = p - q;
            while d > PI {
                offset -= 2.0 * PI;
                d -= 2.0 * PI;
            }
            while d < -PI {
                offset += 2.0 * PI;
                d += 2.0 * PI;
            }
        }
        out.push(p + offset);
        prev = Some(p);
    }
    out
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let g = vec![Complex64::new(1.0, 0.0); 2];
        assert!(FrequencyResponse::new(vec![1.0, 2.0], g.clone()).is_ok());
        assert!(FrequencyResponse::new(vec![2.0, 1.0], g.clone()).is_err());
        assert!(FrequencyResponse::new(vec![0.0, 1.0], g.clone()).is_err());
        assert!(FrequencyResponse::new(vec![1.0], g.clone()).is_err());
        assert!(FrequencyResponse::with_nyquist(vec![1.0, 200.0], g.clone(), 125.0).is_err());
        let fr = FrequencyResponse::new(vec![1.0, 2.0], g).unwrap();
        assert!(fr.clone().with_coherence(vec![1.0]).is_err());
        let fr = fr.with_coherence(vec![0.9, 0.3]).unwrap();
        assert_eq!(fr.low_coherence(0.6), vec![false, true]);
        assert_eq!(fr.select(&[true, false]).frequencies(), &[1.0]);
    }

    #[test]
    fn unwrap_removes_jumps() {
        let raw = [3.0, -3.0, 3.1, -3.0];
        let u = unwrap(&raw);
        for w in u.windows(2) {
            assert!((w[1] - w[0]).abs() < std::f64::consts::PI);
        }
    }

    #[test]
    fn logspace_endpoints() {
        let v = logspace(0.1, 100.0, 4);
        assert!((v[0] - 0.1).abs() < 1e-15 && (v[3] - 100.0).abs() < 1e-12);
        assert!((v[1] - 1.0).abs() < 1e-12);
    }
}
