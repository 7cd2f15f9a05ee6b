use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};

use super::geometry::{HexJetGeometry, GRAVITY};
use crate::error::{Error, Result};

/// Rigid-body state. The inertial frame is z-up with gravity along −z;
/// the body frame has z along the unvectored thrust axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    /// Body-to-inertial rotation.
    pub attitude: Quaternion<f64>,
    /// Body rates (rad/s).
    pub rates: Vector3<f64>,
    /// Inertial velocity (m/s).
    pub velocity: Vector3<f64>,
    /// Inertial position (m).
    pub position: Vector3<f64>,
}

impl Default for VehicleState {
    fn default() -> Self {
        Self {
            attitude: Quaternion::identity(),
            rates: Vector3::zeros(),
            velocity: Vector3::zeros(),
            position: Vector3::zeros(),
        }
    }
}

impl VehicleState {
    pub fn rotation(&self) -> Matrix3<f64> {
        UnitQuaternion::new_unchecked(self.attitude).to_rotation_matrix().into_inner()
    }

    pub fn is_finite(&self) -> bool {
        self.attitude.coords.iter().all(|v| v.is_finite())
            && self.rates.iter().all(|v| v.is_finite())
            && self.velocity.iter().all(|v| v.is_finite())
            && self.position.iter().all(|v| v.is_finite())
    }

    /// Rotational kinetic energy ½ ωᵀJω.
    pub fn kinetic_energy(&self, j: &Matrix3<f64>) -> f64 {
        0.5 * self.rates.dot(&(j * self.rates))
    }

    /// Angular momentum magnitude |Jω|.
    pub fn angular_momentum(&self, j: &Matrix3<f64>) -> f64 {
        (j * self.rates).norm()
    }
}

#[derive(Clone, Copy)]
struct Deriv {
    q: Quaternion<f64>,
    w: Vector3<f64>,
    v: Vector3<f64>,
    p: Vector3<f64>,
}

struct Model {
    mass: f64,
    j: Matrix3<f64>,
    j_inv: Matrix3<f64>,
    force: Vector3<f64>,
    torque: Vector3<f64>,
}

impl Model {
    fn deriv(&self, s: &VehicleState) -> Deriv {
        let r = UnitQuaternion::new_unchecked(s.attitude.normalize()).to_rotation_matrix().into_inner();
        let gravity = Vector3::new(0.0, 0.0, -GRAVITY * self.mass);
        let acc = (gravity + r * self.force) / self.mass;
        let jw = self.j * s.rates;
        let wdot = self.j_inv * (self.torque - s.rates.cross(&jw));
        let omega = Quaternion::from_parts(0.0, s.rates);
        Deriv {
            q: s.attitude * omega * 0.5,
            w: wdot,
            v: acc,
            p: s.velocity,
        }
    }
}

fn advance(s: &VehicleState, d: &Deriv, h: f64) -> VehicleState {
    VehicleState {
        attitude: s.attitude + d.q * h,
        rates: s.rates + d.w * h,
        velocity: s.velocity + d.v * h,
        position: s.position + d.p * h,
    }
}

/// Integrates `m v̇ = f_g + R F_b`, `J ω̇ = M_b − ω × Jω` over `dt` with
/// classical RK4, holding body force and torque constant, then
/// renormalizes the attitude quaternion.
pub fn step_dynamics(state: &VehicleState, geom: &HexJetGeometry, force: &Vector3<f64>, torque: &Vector3<f64>, dt: f64) -> Result<VehicleState> {
    if !(dt > 0.0 && dt <= 0.01) {
        return Err(Error::InvalidSpec(format!("dt must be in (0, 0.01], got {dt}")));
    }
    let j = geom.inertia_matrix();
    let j_inv = j
        .try_inverse()
        .ok_or_else(|| Error::InvalidSpec("singular inertia".into()))?;
    let m = Model {
        mass: geom.mass,
        j,
        j_inv,
        force: *force,
        torque: *torque,
    };
    let k1 = m.deriv(state);
    let k2 = m.deriv(&advance(state, &k1, 0.5 * dt));
    let k3 = m.deriv(&advance(state, &k2, 0.5 * dt));
    let k4 = m.deriv(&advance(state, &k3, dt));
    let combine = Deriv {
        q: (k1.q + k2.q * 2.0 + k3.q * 2.0 + k4.q) / 6.0,
        w: (k1.w + k2.w * 2.0 + k3.w * 2.0 + k4.w) / 6.0,
        v: (k1.v + k2.v * 2.0 + k3.v * 2.0 + k4.v) / 6.0,
        p: (k1.p + k2.p * 2.0 + k3.p * 2.0 + k4.p) / 6.0,
    };
    let mut next = advance(state, &combine, dt);
    if !next.is_finite() {
        return Err(Error::Diverged {
            time: f64::NAN,
            reason: "non-finite rigid-body state".into(),
        });
    }
    next.attitude = next.attitude.normalize();
    Ok(next)
}
