use nalgebra::Vector3;

use super::geometry::HexJetGeometry;

/// Requested vertical thrust (N, body z) and body torque (N m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationRequest {
    pub thrust: f64,
    pub torque: Vector3<f64>,
}

/// Group throttles in [0, 1] and tilt angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub throttle_left: f64,
    pub throttle_right: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Set when any output had to be clamped.
    pub saturated: bool,
}

impl Allocation {
    pub fn thrust_left(&self, geom: &HexJetGeometry) -> f64 {
        self.throttle_left * geom.max_thrust
    }

    pub fn thrust_right(&self, geom: &HexJetGeometry) -> f64 {
        self.throttle_right * geom.max_thrust
    }
}

/// Inverts the grouped thrust/torque map. Roll torque becomes a thrust
/// differential, pitch torque a common tilt and yaw torque a differential
/// tilt, while the body-z thrust is held at the request. Each group's
/// in-plane thrust components are solved exactly, then converted to a
/// magnitude and tilt.
pub fn allocate(geom: &HexJetGeometry, req: &AllocationRequest) -> Allocation {
    let (t, tau) = (req.thrust, req.torque);
    let pitch = tau.y / (3.0 * geom.lz);
    let yaw = tau.z / (3.0 * geom.ly);
    let roll = tau.x / (3.0 * geom.ly);
    // F_L sin α1, F_R sin α2, F_L cos α1, F_R cos α2
    let p = 0.5 * (pitch + yaw);
    let q = 0.5 * (pitch - yaw);
    let r = 0.5 * (t / 3.0 - roll);
    let s = 0.5 * (t / 3.0 + roll);
    let mut saturated = false;
    let mut solve = |x: f64, z: f64| {
        let mut a = x.atan2(z);
        if a.abs() > geom.tilt_limit {
            a = a.clamp(-geom.tilt_limit, geom.tilt_limit);
            saturated = true;
        }
        let mut thr = x.hypot(z) / geom.max_thrust;
        if !(0.0..=1.0).contains(&thr) {
            thr = thr.clamp(0.0, 1.0);
            saturated = true;
        }
        (thr, a)
    };
    let (throttle_left, alpha1) = solve(p, r);
    let (throttle_right, alpha2) = solve(q, s);
    Allocation {
        throttle_left,
        throttle_right,
        alpha1,
        alpha2,
        saturated,
    }
}
