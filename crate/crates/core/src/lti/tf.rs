use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::delay::DelayLine;
use super::freq::FrequencyResponse;
use super::poly;
use super::ss::LinearStateSpace;
use crate::error::{ensure_finite, Error, Result};

/// Default distance from z = 1 within which a pole is reported as an
/// integrator by [`DelayedTransferFunction::has_integrator`].
pub const INTEGRATOR_TOLERANCE: f64 = 1e-3;

/// Rational discrete-time transfer function with an integer input delay:
/// `G(z) = N(z)/D(z) · z^-h`.
///
/// Coefficients are in descending powers of z. The denominator is kept monic
/// and its degree is at least the numerator's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTf", into = "RawTf")]
pub struct DelayedTransferFunction {
    num: Vec<f64>,
    den: Vec<f64>,
    delay: usize,
    ts: f64,
}

#[derive(Serialize, Deserialize)]
struct RawTf {
    numerator: Vec<f64>,
    denominator: Vec<f64>,
    #[serde(default)]
    delay_samples: usize,
    sample_time: f64,
}

impl TryFrom<RawTf> for DelayedTransferFunction {
    type Error = Error;
    fn try_from(r: RawTf) -> Result<Self> {
        Self::new(r.numerator, r.denominator, r.delay_samples, r.sample_time)
    }
}

impl From<DelayedTransferFunction> for RawTf {
    fn from(t: DelayedTransferFunction) -> Self {
        RawTf {
            numerator: t.num,
            denominator: t.den,
            delay_samples: t.delay,
            sample_time: t.ts,
        }
    }
}

impl DelayedTransferFunction {
    /// Builds a transfer function, normalizing the denominator to be monic
    /// and stripping leading zero coefficients.
    pub fn new(numerator: Vec<f64>, denominator: Vec<f64>, delay_samples: usize, sample_time: f64) -> Result<Self> {
        if numerator.is_empty() || denominator.is_empty() {
            return Err(Error::InvalidModel("empty coefficient list".into()));
        }
        if numerator.iter().chain(&denominator).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("transfer function coefficients"));
        }
        if !(sample_time.is_finite() && sample_time > 0.0) {
            return Err(Error::InvalidModel(format!("sample time must be > 0, got {sample_time}")));
        }
        let den = poly::trim(&denominator);
        if den[0] == 0.0 {
            return Err(Error::InvalidModel("denominator is identically zero".into()));
        }
        let mut num = poly::trim(&numerator);
        if num.len() > den.len() {
            return Err(Error::InvalidModel(format!(
                "improper: numerator degree {} exceeds denominator degree {}",
                num.len() - 1,
                den.len() - 1
            )));
        }
        let lead = den[0];
        let den: Vec<f64> = den.iter().map(|v| v / lead).collect();
        for v in &mut num {
            *v /= lead;
        }
        Ok(Self {
            num,
            den,
            delay: delay_samples,
            ts: sample_time,
        })
    }

    pub fn gain(k: f64, sample_time: f64) -> Result<Self> {
        Self::new(vec![k], vec![1.0], 0, sample_time)
    }

    pub fn identity(sample_time: f64) -> Result<Self> {
        Self::gain(1.0, sample_time)
    }

    pub fn pure_delay(h: usize, sample_time: f64) -> Result<Self> {
        Self::new(vec![1.0], vec![1.0], h, sample_time)
    }

    pub fn numerator(&self) -> &[f64] {
        &self.num
    }

    pub fn denominator(&self) -> &[f64] {
        &self.den
    }

    pub fn delay_samples(&self) -> usize {
        self.delay
    }

    pub fn sample_time(&self) -> f64 {
        self.ts
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.ts
    }

    pub fn order(&self) -> usize {
        self.den.len() - 1
    }

    /// Same coefficients with a different input delay.
    pub fn with_delay(&self, delay_samples: usize) -> Self {
        Self {
            delay: delay_samples,
            ..self.clone()
        }
    }

    /// Numerator scaled by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            num: self.num.iter().map(|v| v * k).collect(),
            ..self.clone()
        }
    }

    pub fn poles(&self) -> Vec<Complex64> {
        poly::roots(&self.den)
    }

    pub fn zeros(&self) -> Vec<Complex64> {
        poly::roots(&self.num)
    }

    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.norm() < 1.0)
    }

    /// True when some pole lies within `tol` of z = 1.
    pub fn has_integrator(&self, tol: f64) -> bool {
        self.poles().iter().any(|p| (p - 1.0).norm() <= tol)
    }

    /// `N(1)/D(1)`. The delay has no effect. Fails only when D(1) is zero.
    pub fn dc_gain(&self) -> Result<f64> {
        let d1 = poly::eval(&self.den, 1.0);
        if d1 == 0.0 {
            return Err(Error::IntegratingPlant { pole: 1.0 });
        }
        Ok(poly::eval(&self.num, 1.0) / d1)
    }

    /// Like [`dc_gain`](Self::dc_gain) but treats any pole within `tol` of
    /// z = 1 as an integrator.
    pub fn dc_gain_with_tolerance(&self, tol: f64) -> Result<f64> {
        if let Some(p) = self.poles().into_iter().find(|p| (p - 1.0).norm() <= tol) {
            return Err(Error::IntegratingPlant { pole: p.re });
        }
        self.dc_gain()
    }

    /// `-Ts / ln(p)` for the slowest real pole `p` in (0, 1).
    pub fn dominant_time_constant(&self) -> Result<f64> {
        let p = self
            .poles()
            .into_iter()
            .filter(|p| p.im.abs() < 1e-9 && p.re > 0.0 && p.re < 1.0)
            .map(|p| p.re)
            .fold(None, |acc: Option<f64>, p| Some(acc.map_or(p, |a| a.max(p))))
            .ok_or(Error::NoDominantMode)?;
        Ok(-self.ts / p.ln())
    }

    fn check_frequency(&self, f: f64) -> Result<()> {
        let nyq = self.nyquist();
        if !(f.is_finite() && f > 0.0 && f <= nyq * (1.0 + 1e-12)) {
            return Err(Error::FrequencyOutOfRange { frequency: f, nyquist: nyq });
        }
        Ok(())
    }

    /// Value at an arbitrary point of the z-plane, delay included.
    pub fn eval_z(&self, z: Complex64) -> Complex64 {
        poly::eval_complex(&self.num, z) / poly::eval_complex(&self.den, z) * z.powi(-(self.delay as i32))
    }

    /// Complex gain at frequency `f` Hz, which must lie in (0, Nyquist].
    pub fn evaluate(&self, f: f64) -> Result<Complex64> {
        self.check_frequency(f)?;
        Ok(self.evaluate_unchecked(f))
    }

    pub(crate) fn evaluate_unchecked(&self, f: f64) -> Complex64 {
        let w = 2.0 * std::f64::consts::PI * f * self.ts;
        let z = Complex64::from_polar(1.0, w);
        let rational = poly::eval_complex(&self.num, z) / poly::eval_complex(&self.den, z);
        rational * Complex64::from_polar(1.0, -w * self.delay as f64)
    }

    pub fn frequency_response(&self, frequencies: &[f64]) -> Result<FrequencyResponse> {
        let gains = frequencies
            .iter()
            .map(|&f| self.evaluate(f))
            .collect::<Result<Vec<_>>>()?;
        FrequencyResponse::new(frequencies.to_vec(), gains)
    }

    fn same_ts(&self, other: &Self) -> Result<()> {
        if (self.ts - other.ts).abs() > 1e-12 * self.ts.max(other.ts) {
            return Err(Error::SampleTimeMismatch {
                left: self.ts,
                right: other.ts,
            });
        }
        Ok(())
    }

    /// `self · other`; delays add.
    pub fn series(&self, other: &Self) -> Result<Self> {
        self.same_ts(other)?;
        Self::new(
            poly::mul(&self.num, &other.num),
            poly::mul(&self.den, &other.den),
            self.delay + other.delay,
            self.ts,
        )
    }

    /// Negative feedback `self / (1 + self·other)`. The loop delay is
    /// absorbed into the polynomials; the forward delay stays explicit.
    pub fn feedback(&self, other: &Self) -> Result<Self> {
        self.same_ts(other)?;
        let loop_at_inf = if self.delay + other.delay == 0 {
            let a = if self.num.len() == self.den.len() { self.num[0] } else { 0.0 };
            let b = if other.num.len() == other.den.len() { other.num[0] } else { 0.0 };
            a * b
        } else {
            0.0
        };
        if (1.0 + loop_at_inf).abs() < 1e-12 {
            return Err(Error::InvalidModel("feedback loop is not well-posed (1 + L(inf) = 0)".into()));
        }
        // T = Na Db z^(ha+hb) / (Da Db z^(ha+hb) + Na Nb) · z^-ha
        let hb = other.delay;
        let num = poly::shift(&poly::mul(&self.num, &other.den), self.delay + hb);
        let den = poly::add(
            &poly::shift(&poly::mul(&self.den, &other.den), self.delay + hb),
            &poly::mul(&self.num, &other.num),
        );
        let (num, den) = cancel_common_z(num, den);
        Self::new(num, den, self.delay, self.ts)
    }

    /// `self / other`, used for bin-wise model correction ratios. The
    /// inverted delay is subtracted from the result's delay; any excess
    /// relative degree is paid for out of the remaining delay.
    pub fn divide(&self, other: &Self) -> Result<Self> {
        self.same_ts(other)?;
        let inv_num = poly::trim(&other.num);
        if inv_num == [0.0] {
            return Err(Error::InvalidModel("cannot invert a zero transfer function".into()));
        }
        let net = self.delay as i64 - other.delay as i64;
        if net < 0 {
            return Err(Error::NonCausal(net));
        }
        let num = poly::mul(&self.num, &other.den);
        let den = poly::mul(&self.den, &inv_num);
        let num_deg = poly::degree(&num);
        let den_deg = poly::degree(&den);
        let mut den = poly::trim(&den);
        let mut delay = net as usize;
        if num_deg > den_deg {
            let excess = num_deg - den_deg;
            if excess > delay {
                return Err(Error::NonCausal(delay as i64 - excess as i64));
            }
            den = poly::shift(&den, excess);
            delay -= excess;
        }
        Self::new(num, den, delay, self.ts)
    }

    /// Controllable canonical realization carrying the same input delay.
    pub fn realize(&self) -> LinearStateSpace {
        let (a, b, c, d) = canonical(&self.num, &self.den);
        let n = a.len();
        let mut am = nalgebra::DMatrix::zeros(n, n);
        for j in 0..n {
            am[(0, j)] = -a[j];
        }
        for i in 1..n {
            am[(i, i - 1)] = 1.0;
        }
        let mut bm = nalgebra::DMatrix::zeros(n, 1);
        if n > 0 {
            bm[(0, 0)] = b;
        }
        let cm = nalgebra::DMatrix::from_row_slice(1, n, &c);
        let dm = nalgebra::DMatrix::from_element(1, 1, d);
        LinearStateSpace::new(am, bm, cm, dm, self.delay, self.ts).expect("canonical realization is consistent")
    }

    /// Response to an input sequence from rest.
    pub fn simulate(&self, input: &[f64]) -> Result<Vec<f64>> {
        let mut st = TfState::new(self);
        input.iter().map(|&u| st.step(u)).collect()
    }
}

/// Cancels a common z^k factor (shared trailing zeros).
fn cancel_common_z(mut num: Vec<f64>, mut den: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    while num.len() > 1 && den.len() > 1 && num.last() == Some(&0.0) && den.last() == Some(&0.0) {
        num.pop();
        den.pop();
    }
    (num, den)
}

/// Returns (a_1..a_n, b, c, d) of the controllable canonical form for
/// monic `den`, with `num` padded to the denominator length.
fn canonical(num: &[f64], den: &[f64]) -> (Vec<f64>, f64, Vec<f64>, f64) {
    let n = den.len() - 1;
    let mut b = vec![0.0; n + 1 - num.len()];
    b.extend_from_slice(num);
    let b0 = b[0];
    let a: Vec<f64> = den[1..].to_vec();
    let c: Vec<f64> = (0..n).map(|i| b[i + 1] - a[i] * b0).collect();
    (a, 1.0, c, b0)
}

/// Simulation state for a [`DelayedTransferFunction`]: controllable
/// canonical state plus the input delay line.
#[derive(Debug, Clone)]
pub struct TfState {
    a: Vec<f64>,
    c: Vec<f64>,
    d: f64,
    x: Vec<f64>,
    line: DelayLine<f64>,
}

impl TfState {
    pub fn new(tf: &DelayedTransferFunction) -> Self {
        let (a, _, c, d) = canonical(&tf.num, &tf.den);
        let n = a.len();
        Self {
            a,
            c,
            d,
            x: vec![0.0; n],
            line: DelayLine::new(tf.delay, 0.0),
        }
    }

    /// Advances one sample and returns the output for this input.
    pub fn step(&mut self, input: f64) -> Result<f64> {
        ensure_finite(input, "transfer function input")?;
        let u = self.line.push(input);
        let y = self.c.iter().zip(&self.x).map(|(c, x)| c * x).sum::<f64>() + self.d * u;
        let n = self.x.len();
        if n > 0 {
            let head = u - self.a.iter().zip(&self.x).map(|(a, x)| a * x).sum::<f64>();
            for i in (1..n).rev() {
                self.x[i] = self.x[i - 1];
            }
            self.x[0] = head;
        }
        Ok(y)
    }

    /// Output the next `step` will produce, computed without knowing the
    /// next input. Exact when the plant is strictly proper or delayed; for
    /// a biproper undelayed plant the feedthrough of the unknown input is
    /// left out.
    pub fn peek_output(&self) -> f64 {
        let u = self.line.front().copied().unwrap_or(0.0);
        self.c.iter().zip(&self.x).map(|(c, x)| c * x).sum::<f64>() + self.d * u
    }

    /// True when [`peek_output`](Self::peek_output) is exact.
    pub fn output_is_predetermined(&self) -> bool {
        self.d == 0.0 || !self.line.is_empty()
    }

    pub fn state(&self) -> &[f64] {
        &self.x
    }

    /// Puts the model in steady state for a constant input `u`: every
    /// canonical state equals `u / D(1)` and the delay line holds `u`.
    pub fn settle(&mut self, u: f64) {
        let d1 = 1.0 + self.a.iter().sum::<f64>();
        self.x.iter_mut().for_each(|v| *v = u / d1);
        self.line.reset(u);
    }

    pub fn reset(&mut self) {
        self.x.iter_mut().for_each(|v| *v = 0.0);
        self.line.reset(0.0);
    }
}

/// One simulation step of `plant` from `state`.
pub fn step_tf(plant: &DelayedTransferFunction, state: &mut TfState, input: f64) -> Result<f64> {
    debug_assert_eq!(state.x.len(), plant.order());
    state.step(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn tf(num: &[f64], den: &[f64], h: usize, ts: f64) -> DelayedTransferFunction {
        DelayedTransferFunction::new(num.to_vec(), den.to_vec(), h, ts).unwrap()
    }

    #[test]
    fn normalizes_to_monic() {
        let g = tf(&[2.0], &[2.0, -1.0], 3, 0.1);
        assert_eq!(g.denominator(), &[1.0, -0.5]);
        assert_eq!(g.numerator(), &[1.0]);
        let g = tf(&[0.0, 0.0, 1.0], &[0.0, 1.0, 0.5], 0, 0.1);
        assert_eq!(g.numerator(), &[1.0]);
        assert_eq!(g.denominator(), &[1.0, 0.5]);
    }

    #[test]
    fn rejects_invalid() {
        assert!(DelayedTransferFunction::new(vec![1.0, 0.0], vec![1.0], 0, 0.1).is_err());
        assert!(DelayedTransferFunction::new(vec![1.0], vec![0.0], 0, 0.1).is_err());
        assert!(DelayedTransferFunction::new(vec![1.0], vec![1.0], 0, 0.0).is_err());
        assert!(DelayedTransferFunction::new(vec![f64::NAN], vec![1.0], 0, 0.1).is_err());
        assert!(DelayedTransferFunction::new(vec![], vec![1.0], 0, 0.1).is_err());
    }

    #[test]
    fn identity_step() {
        let g = DelayedTransferFunction::identity(0.004).unwrap();
        let mut s = TfState::new(&g);
        assert_eq!(step_tf(&g, &mut s, 3.7).unwrap(), 3.7);
    }

    #[test]
    fn non_finite_input_rejected() {
        let g = models::g_turbo();
        let mut s = TfState::new(&g);
        assert!(matches!(s.step(f64::INFINITY), Err(Error::NonFinite(_))));
    }

    #[test]
    fn turbo_step_is_zero_for_delay_then_settles() {
        let g = models::g_turbo();
        let y = g.simulate(&vec![1.0; 10_000]).unwrap();
        assert!(y[..25].iter().all(|&v| v == 0.0));
        assert_eq!(y[25], 0.0);
        assert!(y[26] > 0.0);
        // 0.01866 / (1 - 0.9879)
        assert_relative_eq!(y[9_999], 1.542_148_760_330_578_5, max_relative = 1e-6);
        assert_relative_eq!(g.dc_gain().unwrap(), 1.542_148_760_330_578_5, max_relative = 1e-12);
    }

    #[test]
    fn dc_gains() {
        // 0.2554 / (1 - 0.8748)
        let edf = models::g_edf();
        assert_relative_eq!(edf.dc_gain().unwrap(), 2.039_936_102_236_421_6, max_relative = 1e-12);
        let y = edf.simulate(&vec![1.0; 10_000]).unwrap();
        assert_relative_eq!(y[9_999], 2.039_936_102_236_421_6, max_relative = 1e-9);

        let k = tf(&[2.0], &[1.0], 40, 0.004);
        assert_eq!(k.dc_gain().unwrap(), 2.0);

        // 0.0689 * 2.4538 / (0.0001 * 0.0976)
        let roll = models::hexjet_roll();
        assert_relative_eq!(roll.dc_gain().unwrap(), 17_322.418_032_786_9, max_relative = 1e-6);
        assert!(matches!(
            roll.dc_gain_with_tolerance(INTEGRATOR_TOLERANCE),
            Err(Error::IntegratingPlant { .. })
        ));
        assert!(roll.has_integrator(INTEGRATOR_TOLERANCE));

        let integ = tf(&[1.0], &[1.0, -1.0], 0, 0.1);
        assert!(matches!(integ.dc_gain(), Err(Error::IntegratingPlant { .. })));
    }

    #[test]
    fn time_constants() {
        assert_relative_eq!(models::g_turbo().dominant_time_constant().unwrap(), 0.328_574, max_relative = 1e-5);
        assert_relative_eq!(models::g_edf().dominant_time_constant().unwrap(), 0.029_904_3, max_relative = 1e-5);
        let g = tf(&[1.0], &[1.0, -(-1.0f64).exp()], 0, 1.0);
        assert_relative_eq!(g.dominant_time_constant().unwrap(), 1.0, epsilon = 1e-12);
        let osc = tf(&[1.0], &[1.0, 0.0, 0.25], 0, 1.0);
        assert!(matches!(osc.dominant_time_constant(), Err(Error::NoDominantMode)));
        let neg = tf(&[1.0], &[1.0, 0.5], 0, 1.0);
        assert!(matches!(neg.dominant_time_constant(), Err(Error::NoDominantMode)));
    }

    #[test]
    fn evaluate_examples() {
        let k = DelayedTransferFunction::gain(2.0, 0.004).unwrap();
        for f in [0.1, 10.0, 125.0] {
            let g = k.evaluate(f).unwrap();
            assert_eq!(g, Complex64::new(2.0, 0.0));
        }
        let d = DelayedTransferFunction::pure_delay(25, 0.004).unwrap();
        let g = d.evaluate(1.0).unwrap();
        assert_relative_eq!(g.norm(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(g.arg(), -0.2 * std::f64::consts::PI, epsilon = 1e-12);
        assert!(matches!(d.evaluate(125.1), Err(Error::FrequencyOutOfRange { .. })));
        assert!(d.evaluate(0.0).is_err());
        let turbo = models::g_turbo();
        assert_relative_eq!(turbo.evaluate(1e-6).unwrap().norm(), 1.542_148_76, max_relative = 1e-6);
    }

    #[test]
    fn series_examples() {
        let g = models::g_turbo();
        let id = DelayedTransferFunction::identity(0.004).unwrap();
        assert_eq!(g.series(&id).unwrap(), g);
        let a = DelayedTransferFunction::pure_delay(3, 0.1).unwrap();
        let b = DelayedTransferFunction::pure_delay(4, 0.1).unwrap();
        let c = a.series(&b).unwrap();
        assert_eq!(c.delay_samples(), 7);
        assert_eq!(c.numerator(), &[1.0]);
        let other = DelayedTransferFunction::identity(0.0025).unwrap();
        assert!(matches!(g.series(&other), Err(Error::SampleTimeMismatch { .. })));
    }

    #[test]
    fn refinement_ratio() {
        let r = models::g_turbo().divide(&models::g_edf()).unwrap();
        assert_eq!(r.delay_samples(), 25);
        let p = r.poles();
        let z = r.zeros();
        assert_eq!(p.len(), 1);
        assert_eq!(z.len(), 1);
        assert_relative_eq!(p[0].re, 0.9879, epsilon = 1e-12);
        assert_relative_eq!(z[0].re, 0.8748, epsilon = 1e-12);
        assert_relative_eq!(r.numerator()[0], 0.01866 / 0.2554, epsilon = 1e-12);

        let bad = models::g_edf().divide(&models::g_turbo());
        assert!(matches!(bad, Err(Error::NonCausal(-25))));
    }

    #[test]
    fn divide_pays_relative_degree_from_delay() {
        let a = tf(&[1.0], &[1.0], 3, 1.0);
        let b = tf(&[1.0], &[1.0, -0.5], 0, 1.0);
        let r = a.divide(&b).unwrap();
        assert_eq!(r.delay_samples(), 2);
        for f in [0.05, 0.2, 0.4] {
            let want = a.evaluate(f).unwrap() / b.evaluate(f).unwrap();
            assert!((r.evaluate(f).unwrap() - want).norm() < 1e-12);
        }
        let c = tf(&[1.0], &[1.0], 0, 1.0);
        assert!(matches!(c.divide(&b), Err(Error::NonCausal(-1))));
    }

    #[test]
    fn feedback_matches_pointwise() {
        let g = models::quad_roll_tf();
        let k = DelayedTransferFunction::gain(0.004, g.sample_time()).unwrap();
        let cl = g.series(&k).unwrap().with_delay(5);
        let t = cl.feedback(&DelayedTransferFunction::identity(g.sample_time()).unwrap()).unwrap();
        for f in [0.5, 5.0, 50.0, 150.0] {
            let l = cl.evaluate(f).unwrap();
            let want = l / (1.0 + l);
            assert!((t.evaluate(f).unwrap() - want).norm() < 1e-9 * want.norm().max(1.0));
        }
        let one = DelayedTransferFunction::gain(-1.0, 1.0).unwrap();
        let id = DelayedTransferFunction::identity(1.0).unwrap();
        assert!(one.feedback(&id).is_err());
    }

    #[test]
    fn realization_matches_tf_simulation() {
        let g = models::quad_roll_tf().with_delay(3);
        let ss = g.realize();
        let u: Vec<f64> = (0..5000).map(|k| ((k as f64) * 0.37).sin() + if k % 97 < 40 { 1.0 } else { -0.5 }).collect();
        let a = g.simulate(&u).unwrap();
        let b = ss.simulate(&u).unwrap();
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "max deviation {err}");
    }

    #[test]
    fn peek_matches_step_for_strictly_proper() {
        let g = models::quad_roll_tf();
        let mut s = TfState::new(&g);
        assert!(s.output_is_predetermined());
        for k in 0..50 {
            let p = s.peek_output();
            let y = s.step((k as f64).cos()).unwrap();
            assert_eq!(p, y);
        }
        let bip = tf(&[1.0, 0.5], &[1.0, -0.5], 0, 1.0);
        assert!(!TfState::new(&bip).output_is_predetermined());
    }

    #[test]
    fn settle_gives_steady_output() {
        let g = models::hexjet_roll().with_delay(4);
        let g = g.scaled(1.0 / g.dc_gain().unwrap());
        let mut s = TfState::new(&g);
        s.settle(0.6);
        for _ in 0..50 {
            approx::assert_relative_eq!(s.step(0.6).unwrap(), 0.6, max_relative = 1e-9);
        }
    }

    #[test]
    fn serde_round_trip() {
        let g = models::hexjet_roll();
        let s = serde_json::to_string(&g).unwrap();
        let back: DelayedTransferFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"numerator":[1,2],"denominator":[1],"sample_time":0.1}"#;
        assert!(serde_json::from_str::<DelayedTransferFunction>(bad).is_err());
    }

    fn stable_first_or_second_order() -> impl Strategy<Value = DelayedTransferFunction> {
        (
            -0.95f64..0.95,
            -0.95f64..0.95,
            proptest::collection::vec(-2.0f64..2.0, 1..3),
            0usize..30,
            prop_oneof![Just(0.004), Just(0.0025)],
        )
            .prop_map(|(p1, p2, num, h, ts)| {
                let den = poly::from_real_roots(&[p1, p2]);
                DelayedTransferFunction::new(num, den, h, ts).unwrap()
            })
    }

    proptest! {
        #[test]
        fn step_response_zero_during_delay(g in stable_first_or_second_order()) {
            let y = g.simulate(&vec![1.0; g.delay_samples() + 5]).unwrap();
            prop_assert!(y[..g.delay_samples()].iter().all(|&v| v == 0.0));
        }

        #[test]
        fn dc_gain_matches_long_simulation(g in stable_first_or_second_order()) {
            let dc = g.dc_gain().unwrap();
            prop_assume!(dc.abs() > 1e-3);
            let y = g.simulate(&vec![1.0; 2000]).unwrap();
            prop_assert!((y[1999] - dc).abs() <= 1e-6 * dc.abs());
        }

        #[test]
        fn pure_delay_phase_exact(h in 0usize..60, frac in 0.001f64..1.0) {
            let d = DelayedTransferFunction::pure_delay(h, 0.004).unwrap();
            let f = frac * d.nyquist();
            let g = d.evaluate(f).unwrap();
            let want = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * 0.004 * h as f64);
            prop_assert!((g.norm() - 1.0).abs() < 1e-12);
            prop_assert!((g - want).norm() < 1e-9);
        }

        #[test]
        fn series_delay_additive(a in stable_first_or_second_order(), hb in 0usize..30) {
            let b = DelayedTransferFunction::pure_delay(hb, a.sample_time()).unwrap();
            prop_assert_eq!(a.series(&b).unwrap().delay_samples(), a.delay_samples() + hb);
        }

        #[test]
        fn realization_equivalence(g in stable_first_or_second_order(), seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let u: Vec<f64> = (0..5000).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let a = g.simulate(&u).unwrap();
            let b = g.realize().simulate(&u).unwrap();
            let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            prop_assert!(err < 1e-9);
        }
    }
}
