//! Discrete-time flight-control simulation and system identification for
//! thrust-vectoring turbojet VTOL vehicles with long actuator delays.
//!
//! The crate is organised bottom-up:
//!
//! * [`lti`]: delayed transfer functions, state-space realizations, delay
//!   lines and frequency responses.
//! * [`predictor`]: Smith predictor, d-step state predictor and the
//!   double-integrator Luenberger observer.
//! * [`control`]: quaternion attitude loop plus PID rate loop, with predictor
//!   insertion points.
//! * [`vehicle`]: Hex-Jet rigid-body model, thrust/torque map and allocation,
//!   and the quadrotor roll-rate plant used for the comparison experiments.
//! * [`sysid`]: sweep excitation, Welch transfer-function estimation,
//!   delayed low-order fitting and open-loop margins.
//! * [`bench`]: scenario runner and the experiment matrix (tracking,
//!   disturbance rejection, payload robustness, flight-test scenarios).
//! * [`config`]: the plain-text TOML configuration with `include` support.

pub mod bench;
pub mod config;
pub mod control;
pub mod error;
pub mod io;
pub mod lti;
pub mod models;
mod noise;
pub mod par;
pub mod predictor;
pub mod sysid;
pub mod vehicle;

pub use error::{Error, Result};
