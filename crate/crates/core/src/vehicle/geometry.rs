use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GRAVITY: f64 = 9.80665;

/// Engine group sharing one tilt servo.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    /// Engines 2, 3, 6 on the `-y` side, tilt `α1`, thrust `F_L`.
    Left,
    /// Engines 1, 4, 5 on the `+y` side, tilt `α2`, thrust `F_R`.
    Right,
}

/// Group of engine `i` (0-based index for engine number `i + 1`).
pub fn group_of(i: usize) -> Group {
    match i {
        1 | 2 | 5 => Group::Left,
        _ => Group::Right,
    }
}

/// Airframe geometry and mass properties.
///
/// The default offsets and inertia are estimates for a 5.525 kg vehicle
/// with a 400 x 400 x 260 mm frame, not measured values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HexJetGeometry {
    pub lx: f64,
    pub ly: f64,
    pub lz: f64,
    pub mass: f64,
    /// Row-major 3x3 inertia (kg m²).
    pub inertia: [[f64; 3]; 3],
    /// Static thrust of one engine at full throttle (N).
    pub max_thrust: f64,
    /// Servo tilt limit (rad), symmetric.
    pub tilt_limit: f64,
}

impl Default for HexJetGeometry {
    fn default() -> Self {
        let m = 5.525;
        let (a, b, c) = (0.4f64, 0.4f64, 0.26f64);
        let jxx = m / 12.0 * (b * b + c * c);
        let jyy = m / 12.0 * (a * a + c * c);
        let jzz = m / 12.0 * (a * a + b * b);
        Self {
            lx: 0.12,
            ly: 0.15,
            lz: 0.05,
            mass: m,
            inertia: [[jxx, 0.0, 0.0], [0.0, jyy, 0.0], [0.0, 0.0, jzz]],
            max_thrust: 12.0 / 6.0 * GRAVITY,
            tilt_limit: 30f64.to_radians(),
        }
    }
}

impl HexJetGeometry {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if [self.lx, self.ly, self.lz, self.mass, self.max_thrust, self.tilt_limit]
            .iter()
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return bad("lengths, mass, thrust and tilt limit must be > 0".into());
        }
        let j = self.inertia_matrix();
        if (j - j.transpose()).amax() > 1e-12 * j.amax() {
            return bad("inertia must be symmetric".into());
        }
        if j.cholesky().is_none() {
            return bad("inertia must be positive definite".into());
        }
        if 6.0 * self.max_thrust < self.mass * GRAVITY {
            return bad(format!(
                "total thrust {} N cannot hover {} kg",
                6.0 * self.max_thrust,
                self.mass
            ));
        }
        Ok(())
    }

    pub fn inertia_matrix(&self) -> Matrix3<f64> {
        let j = self.inertia;
        Matrix3::new(j[0][0], j[0][1], j[0][2], j[1][0], j[1][1], j[1][2], j[2][0], j[2][1], j[2][2])
    }

    /// Engine positions relative to the centre of gravity, body frame.
    pub fn engine_positions(&self) -> [Vector3<f64>; 6] {
        let (x, y, z) = (self.lx, self.ly, self.lz);
        [
            Vector3::new(x, y, z),
            Vector3::new(-x, -y, z),
            Vector3::new(x, -y, z),
            Vector3::new(-x, y, z),
            Vector3::new(0.0, y, z),
            Vector3::new(0.0, -y, z),
        ]
    }

    /// Copy with mass and inertia scaled by `1 + payload_fraction`.
    pub fn with_payload(&self, payload_fraction: f64) -> Self {
        let s = 1.0 + payload_fraction;
        let mut g = *self;
        g.mass *= s;
        for row in g.inertia.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        g
    }

    pub fn hover_thrust_per_engine(&self) -> f64 {
        self.mass * GRAVITY / 6.0
    }
}
