//! Delay compensation: Smith predictor, d-step state predictor and the
//! rate observer feeding it.

pub mod observer;
pub mod smith;
pub mod state;

pub use observer::{LuenbergerObserver, ObserverGain};
pub use smith::SmithPredictor;
pub use state::StatePredictor;
