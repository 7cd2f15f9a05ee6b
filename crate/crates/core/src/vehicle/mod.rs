//! Hex-Jet physical model and the quadrotor roll-rate plant.

pub mod actuators;
pub mod allocation;
pub mod dynamics;
pub mod forces;
pub mod geometry;
pub mod quad;

pub use actuators::{ActuatorBank, ServoParams};
pub use allocation::{allocate, Allocation, AllocationRequest};
pub use dynamics::{step_dynamics, VehicleState};
pub use forces::{body_force, body_torque, ThrustState};
pub use geometry::{HexJetGeometry, GRAVITY};
pub use quad::{quad_roll_plant, roll_model_discrepancy, PlantMode, QuadRollPlant, RollModelDiscrepancy};
