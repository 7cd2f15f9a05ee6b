use crate::error::{ensure_finite, Result};
use crate::lti::{DelayedTransferFunction, TfState};

/// Smith predictor inner loop. Runs the nominal model with and without its
/// delay and adds the difference to the measurement, so the controller sees
/// an estimate of the undelayed output: `ŷ = G_n u − G_n z^-h u + y`.
#[derive(Debug, Clone)]
pub struct SmithPredictor {
    model: DelayedTransferFunction,
    free: TfState,
    delayed: TfState,
}

impl SmithPredictor {
    /// `nominal` carries the model delay `h` as its delay.
    pub fn new(nominal: &DelayedTransferFunction) -> Self {
        let free_model = nominal.with_delay(0);
        Self {
            free: TfState::new(&free_model),
            delayed: TfState::new(nominal),
            model: nominal.clone(),
        }
    }

    pub fn model(&self) -> &DelayedTransferFunction {
        &self.model
    }

    pub fn delay(&self) -> usize {
        self.model.delay_samples()
    }

    pub fn sample_time(&self) -> f64 {
        self.model.sample_time()
    }

    /// One step of the predictor: feeds `control_input` through both model
    /// copies and returns `ŷ_k` for the matching `measured_output` `y_k`.
    pub fn predict(&mut self, control_input: f64, measured_output: f64) -> Result<f64> {
        ensure_finite(measured_output, "smith predictor measurement")?;
        let a = self.free.step(control_input)?;
        let b = self.delayed.step(control_input)?;
        Ok(a - b + measured_output)
    }

    /// `P(z)u` at the current sample, available before the current input is
    /// known. Exact for strictly proper nominal models.
    pub fn correction(&self) -> f64 {
        self.free.peek_output() - self.delayed.peek_output()
    }

    /// Predicted output for the current measurement without advancing.
    pub fn feedback(&self, measured_output: f64) -> f64 {
        measured_output + self.correction()
    }

    /// Advances both model copies with the input finally applied.
    pub fn update(&mut self, control_input: f64) -> Result<()> {
        self.free.step(control_input)?;
        self.delayed.step(control_input)?;
        Ok(())
    }

    pub fn reset(&mut self) {
        self.free.reset();
        self.delayed.reset();
    }
}
