use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::delay::DelayLine;
use super::tf::DelayedTransferFunction;
use crate::error::{Error, Result};

/// Discrete state-space model `x⁺ = A x + B u_{k-h}`, `y = C x + D u_{k-h}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearStateSpace {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
    delay: usize,
    ts: f64,
}

impl LinearStateSpace {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        delay_samples: usize,
        sample_time: f64,
    ) -> Result<Self> {
        let n = a.nrows();
        let dim = |what: &str| Err(Error::DimensionMismatch(what.to_string()));
        if a.ncols() != n {
            return dim("A must be square");
        }
        if b.nrows() != n {
            return dim("B must have as many rows as A");
        }
        if c.ncols() != n {
            return dim("C must have as many columns as A");
        }
        if d.nrows() != c.nrows() || d.ncols() != b.ncols() {
            return dim("D must be p x m");
        }
        if a.iter().chain(b.iter()).chain(c.iter()).chain(d.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("state-space matrices"));
        }
        if !(sample_time.is_finite() && sample_time > 0.0) {
            return Err(Error::InvalidModel(format!("sample time must be > 0, got {sample_time}")));
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            delay: delay_samples,
            ts: sample_time,
        })
    }

    /// Single-input single-output model from row-major slices.
    pub fn siso(a: &[&[f64]], b: &[f64], c: &[f64], d: f64, delay_samples: usize, sample_time: f64) -> Result<Self> {
        let n = a.len();
        let flat: Vec<f64> = a.iter().flat_map(|r| r.iter().copied()).collect();
        if flat.len() != n * n {
            return Err(Error::DimensionMismatch("A must be square".into()));
        }
        Self::new(
            DMatrix::from_row_slice(n, n, &flat),
            DMatrix::from_column_slice(b.len(), 1, b),
            DMatrix::from_row_slice(1, c.len(), c),
            DMatrix::from_element(1, 1, d),
            delay_samples,
            sample_time,
        )
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }
    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }
    pub fn delay_samples(&self) -> usize {
        self.delay
    }
    pub fn sample_time(&self) -> f64 {
        self.ts
    }
    pub fn states(&self) -> usize {
        self.a.nrows()
    }
    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }
    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn with_delay(&self, delay_samples: usize) -> Self {
        Self {
            delay: delay_samples,
            ..self.clone()
        }
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.a.complex_eigenvalues().iter().copied().collect()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `C (zI - A)^-1 B + D` times `z^-h`, first output / first input.
    pub fn eval_z(&self, z: Complex64) -> Result<Complex64> {
        let n = self.states();
        let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            let v = Complex64::new(-self.a[(i, j)], 0.0);
            if i == j {
                v + z
            } else {
                v
            }
        });
        let rhs = DVector::<Complex64>::from_fn(n, |i, _| Complex64::new(self.b[(i, 0)], 0.0));
        let x = m.lu().solve(&rhs).ok_or(Error::RankDeficient)?;
        let y: Complex64 = (0..n).map(|i| x[i] * self.c[(0, i)]).sum::<Complex64>() + self.d[(0, 0)];
        Ok(y * z.powi(-(self.delay as i32)))
    }

    pub fn evaluate(&self, f: f64) -> Result<Complex64> {
        let nyq = 0.5 / self.ts;
        if !(f > 0.0 && f <= nyq * (1.0 + 1e-12)) {
            return Err(Error::FrequencyOutOfRange { frequency: f, nyquist: nyq });
        }
        self.eval_z(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f * self.ts))
    }

    /// Steady-state gain, first output / first input.
    pub fn dc_gain(&self) -> Result<f64> {
        let n = self.states();
        let m = DMatrix::<f64>::identity(n, n) - &self.a;
        let x = m.lu().solve(&self.b.column(0).into_owned()).ok_or(Error::IntegratingPlant { pole: 1.0 })?;
        Ok((self.c.row(0) * x)[(0, 0)] + self.d[(0, 0)])
    }

    /// SISO transfer function of the first input/output pair, via the
    /// Faddeev–LeVerrier recursion for the characteristic polynomial and
    /// the adjugate of `zI − A`.
    pub fn to_tf(&self) -> Result<DelayedTransferFunction> {
        let n = self.states();
        let mut den = vec![1.0];
        let mut num = vec![0.0; n + 1];
        let b = self.b.column(0).into_owned();
        let c = self.c.row(0).into_owned();
        let mut m = DMatrix::<f64>::identity(n, n);
        for k in 1..=n {
            // adj(zI − A) = Σ M_k z^{n−k}
            num[k] = (&c * &m * &b)[(0, 0)];
            let am = &self.a * &m;
            let ck = -am.trace() / k as f64;
            den.push(ck);
            m = am + DMatrix::<f64>::identity(n, n) * ck;
        }
        let d = self.d[(0, 0)];
        for (nv, dv) in num.iter_mut().zip(&den) {
            *nv += d * dv;
        }
        DelayedTransferFunction::new(num, den, self.delay, self.ts)
    }

    /// SISO response to an input sequence from rest.
    pub fn simulate(&self, input: &[f64]) -> Result<Vec<f64>> {
        let mut st = SsState::new(self);
        input.iter().map(|&u| st.step_siso(u)).collect()
    }
}

/// Simulation state for a [`LinearStateSpace`].
#[derive(Debug, Clone)]
pub struct SsState {
    model: LinearStateSpace,
    x: DVector<f64>,
    line: DelayLine<DVector<f64>>,
}

impl SsState {
    pub fn new(model: &LinearStateSpace) -> Self {
        Self::with_state(model, DVector::zeros(model.states()))
    }

    pub fn with_state(model: &LinearStateSpace, x0: DVector<f64>) -> Self {
        Self {
            line: DelayLine::new(model.delay, DVector::zeros(model.inputs())),
            x: x0,
            model: model.clone(),
        }
    }

    pub fn state(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn step(&mut self, u: &DVector<f64>) -> Result<DVector<f64>> {
        if u.len() != self.model.inputs() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} inputs, got {}",
                self.model.inputs(),
                u.len()
            )));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("state-space input"));
        }
        let ud = self.line.push(u.clone());
        let y = &self.model.c * &self.x + &self.model.d * &ud;
        self.x = &self.model.a * &self.x + &self.model.b * &ud;
        Ok(y)
    }

    /// First output the next `step` will produce; the feedthrough of the
    /// unknown next input is left out when there is no delay.
    pub fn peek_output(&self) -> f64 {
        let mut y = (self.model.c.row(0) * &self.x)[(0, 0)];
        if let Some(u) = self.line.front() {
            y += (self.model.d.row(0) * u)[(0, 0)];
        }
        y
    }

    pub fn step_siso(&mut self, u: f64) -> Result<f64> {
        Ok(self.step(&DVector::from_element(1, u))?[0])
    }
}
