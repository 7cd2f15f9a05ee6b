use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lti::{DelayLine, LinearStateSpace};

/// d-step ahead state predictor
/// `x^p_{k+d} = A^d x_k + A^{d-1} B u_{k-d} + ... + B u_{k-1}`.
#[derive(Debug, Clone)]
pub struct StatePredictor {
    a_d: DMatrix<f64>,
    // A^{d-1-i} B for history slot i (oldest first)
    weights: Vec<DVector<f64>>,
    history: DelayLine<f64>,
    d: usize,
}

impl StatePredictor {
    pub fn new(a: &DMatrix<f64>, b: &DVector<f64>, d: usize) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, B has {} rows",
                a.nrows(),
                a.ncols(),
                b.len()
            )));
        }
        let mut powers_b = Vec::with_capacity(d);
        let mut ab = b.clone();
        let mut a_d = DMatrix::<f64>::identity(n, n);
        for _ in 0..d {
            powers_b.push(ab.clone());
            ab = a * ab;
            a_d = a * a_d;
        }
        powers_b.reverse();
        Ok(Self {
            a_d,
            weights: powers_b,
            history: DelayLine::new(d, 0.0),
            d,
        })
    }

    /// Uses the first input column of `model`.
    pub fn from_model(model: &LinearStateSpace, d: usize) -> Result<Self> {
        Self::new(model.a(), &model.b().column(0).into_owned(), d)
    }

    pub fn horizon(&self) -> usize {
        self.d
    }

    pub fn states(&self) -> usize {
        self.a_d.nrows()
    }

    /// Predicted state `d` samples ahead of `x`.
    pub fn predict(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.states() {
            return Err(Error::DimensionMismatch(format!(
                "state estimate has {} entries, model has {}",
                x.len(),
                self.states()
            )));
        }
        let mut xp = &self.a_d * x;
        for (w, &u) in self.weights.iter().zip(self.history.iter()) {
            xp.axpy(u, w, 1.0);
        }
        Ok(xp)
    }

    /// Records `u_k` and returns `u_{k-d}`, the input that reaches a plant
    /// with input delay `d` at this sample.
    pub fn push_input(&mut self, u: f64) -> f64 {
        self.history.push(u)
    }

    /// Buffered inputs, oldest (`u_{k-d}`) first.
    pub fn history(&self) -> impl Iterator<Item = f64> + '_ {
        self.history.iter().copied()
    }

    pub fn reset(&mut self) {
        self.history.reset(0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::SsState;
    use crate::models;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_horizon_is_identity() {
        let m = models::quad_roll_ss();
        let p = StatePredictor::from_model(&m, 0).unwrap();
        let x = DVector::from_vec(vec![0.3, -1.2]);
        assert_eq!(p.predict(&x).unwrap(), x);
    }

    #[test]
    fn identity_dynamics_without_input() {
        let a = DMatrix::<f64>::identity(3, 3);
        let b = DVector::<f64>::zeros(3);
        let mut p = StatePredictor::new(&a, &b, 7).unwrap();
        for k in 0..20 {
            p.push_input(k as f64);
        }
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.predict(&x).unwrap(), x);
    }

    #[test]
    fn dimension_errors() {
        let a = DMatrix::<f64>::identity(2, 2);
        assert!(StatePredictor::new(&a, &DVector::zeros(3), 2).is_err());
        let p = StatePredictor::new(&a, &DVector::zeros(2), 2).unwrap();
        assert!(matches!(p.predict(&DVector::zeros(3)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn history_pushes_out_oldest() {
        let a = DMatrix::<f64>::identity(1, 1);
        let mut p = StatePredictor::new(&a, &DVector::from_element(1, 1.0), 3).unwrap();
        let out: Vec<f64> = (1..=5).map(|k| p.push_input(k as f64)).collect();
        assert_eq!(out, vec![0.0, 0.0, 0.0, 1.0, 2.0]);
        assert_eq!(p.history().collect::<Vec<_>>(), vec![3.0, 4.0, 5.0]);
    }

    fn max_prediction_error(d: usize, seed: u64, steps: usize) -> f64 {
        let model = models::quad_roll_ss();
        let plant_model = model.with_delay(d);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..steps + d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // brute-force oracle: trajectory of the delayed plant
        let mut plant = SsState::new(&plant_model);
        let mut xs = Vec::with_capacity(u.len() + 1);
        for &v in &u {
            xs.push(plant.state().clone());
            plant.step_siso(v).unwrap();
        }
        xs.push(plant.state().clone());
        let mut p = StatePredictor::from_model(&model, d).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..steps {
            let xp = p.predict(&xs[k]).unwrap();
            worst = worst.max((xp - &xs[k + d]).amax());
            p.push_input(u[k]);
        }
        worst
    }

    #[test]
    fn five_step_prediction_matches_simulation() {
        assert!(max_prediction_error(5, 42, 400) < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn prediction_exact(d in 0usize..30, seed in any::<u64>()) {
            prop_assert!(max_prediction_error(d, seed, 200) < 1e-12);
        }
    }
}
