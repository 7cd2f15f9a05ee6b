use nalgebra::{Quaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Proportional attitude gains per body axis (1/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct AttitudeGains([f64; 3]);

impl AttitudeGains {
    pub fn new(k: [f64; 3]) -> Result<Self> {
        if k.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidSpec(format!("attitude gains must be > 0, got {k:?}")));
        }
        Ok(Self(k))
    }

    pub fn uniform(k: f64) -> Result<Self> {
        Self::new([k; 3])
    }

    pub fn get(&self) -> [f64; 3] {
        self.0
    }
}

impl TryFrom<[f64; 3]> for AttitudeGains {
    type Error = Error;
    fn try_from(k: [f64; 3]) -> Result<Self> {
        Self::new(k)
    }
}

impl From<AttitudeGains> for [f64; 3] {
    fn from(g: AttitudeGains) -> Self {
        g.0
    }
}

pub fn check_unit(q: &Quaternion<f64>) -> Result<()> {
    let n = q.norm();
    if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NonUnitQuaternion(n));
    }
    Ok(())
}

/// Body-rate setpoint `2 K sgn(q_e.w) vec(q_e)` with
/// `q_e = current⁻¹ ⊗ setpoint`, the shortest rotation to the setpoint.
pub fn attitude_step(gains: &AttitudeGains, setpoint: &Quaternion<f64>, current: &Quaternion<f64>) -> Result<Vector3<f64>> {
    check_unit(setpoint)?;
    check_unit(current)?;
    let qe = current.conjugate() * setpoint;
    let sign = if qe.w < 0.0 { -1.0 } else { 1.0 };
    let k = gains.0;
    let v = qe.vector();
    Ok(Vector3::new(2.0 * k[0] * sign * v[0], 2.0 * k[1] * sign * v[1], 2.0 * k[2] * sign * v[2]))
}

/// Unit quaternion from roll, pitch, yaw (ZYX order).
pub fn from_euler(roll: f64, pitch: f64, yaw: f64) -> Quaternion<f64> {
    let (sr, cr) = (0.5 * roll).sin_cos();
    let (sp, cp) = (0.5 * pitch).sin_cos();
    let (sy, cy) = (0.5 * yaw).sin_cos();
    Quaternion::new(
        cr * cp * cy + sr * sp * sy,
        sr * cp * cy - cr * sp * sy,
        cr * sp * cy + sr * cp * sy,
        cr * cp * sy - sr * sp * cy,
    )
}

/// Roll, pitch, yaw (ZYX order) of a unit quaternion.
pub fn to_euler(q: &Quaternion<f64>) -> [f64; 3] {
    let (w, x, y, z) = (q.w, q.i, q.j, q.k);
    let roll = (2.0 * (w * x + y * z)).atan2(1.0 - 2.0 * (x * x + y * y));
    let pitch = (2.0 * (w * y - z * x)).clamp(-1.0, 1.0).asin();
    let yaw = (2.0 * (w * z + x * y)).atan2(1.0 - 2.0 * (y * y + z * z));
    [roll, pitch, yaw]
}

/// Rotation angle (rad, in [0, π]) between two unit quaternions.
pub fn angle_between(a: &Quaternion<f64>, b: &Quaternion<f64>) -> f64 {
    let d = (a.conjugate() * b).w.abs().min(1.0);
    2.0 * d.acos()
}
