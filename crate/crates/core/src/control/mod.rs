//! Cascade attitude control: quaternion-error P loop feeding PID rate loops,
//! with the rate feedback optionally replaced by a delay compensator.

pub mod attitude;
pub mod cascade;
pub mod pid;

pub use attitude::{attitude_step, AttitudeGains};
pub use cascade::{cascade_step, CascadeController, CascadeOutput, Compensator, PredictorChoice, RateLoop, RateLoopOutput};
pub use pid::{rate_pid_step, PidState, RatePidGains};
