//! Discrete LTI plant representations, delay lines, stepping and
//! frequency-domain evaluation.

pub mod delay;
pub mod freq;
pub mod model_file;
pub mod poly;
pub mod ss;
pub mod tf;

pub use delay::DelayLine;
pub use freq::FrequencyResponse;
pub use ss::{LinearStateSpace, SsState};
pub use tf::{step_tf, DelayedTransferFunction, TfState, INTEGRATOR_TOLERANCE};
