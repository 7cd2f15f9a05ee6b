use nalgebra::Vector3;

use super::geometry::{group_of, Group, HexJetGeometry};
use crate::error::{Error, Result};

/// Per-engine thrusts (N) and the two group tilt angles (rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrustState {
    pub thrust: [f64; 6],
    /// Tilt of engines 2, 3, 6.
    pub alpha1: f64,
    /// Tilt of engines 1, 4, 5.
    pub alpha2: f64,
}

impl ThrustState {
    /// Equal thrust within each group.
    pub fn grouped(f_left: f64, f_right: f64, alpha1: f64, alpha2: f64) -> Self {
        let mut thrust = [0.0; 6];
        for (i, t) in thrust.iter_mut().enumerate() {
            *t = match group_of(i) {
                Group::Left => f_left,
                Group::Right => f_right,
            };
        }
        Self { thrust, alpha1, alpha2 }
    }

    pub fn tilt(&self, i: usize) -> f64 {
        match group_of(i) {
            Group::Left => self.alpha1,
            Group::Right => self.alpha2,
        }
    }

    /// Mean thrust of the left and right groups.
    pub fn group_means(&self) -> (f64, f64) {
        let (mut l, mut r) = (0.0, 0.0);
        for (i, t) in self.thrust.iter().enumerate() {
            match group_of(i) {
                Group::Left => l += t,
                Group::Right => r += t,
            }
        }
        (l / 3.0, r / 3.0)
    }

    pub fn check_tilt(&self, limit: f64) -> Result<()> {
        for a in [self.alpha1, self.alpha2] {
            if a.abs() > limit + 1e-12 {
                return Err(Error::TiltLimit { angle: a, limit });
            }
        }
        Ok(())
    }
}

/// Thrust vector of engine `i`: the body z axis rotated by its group tilt
/// about body y.
pub fn engine_force(state: &ThrustState, i: usize) -> Vector3<f64> {
    let (s, c) = state.tilt(i).sin_cos();
    Vector3::new(s, 0.0, c) * state.thrust[i]
}

/// Σ F_i by direct summation.
pub fn force_by_summation(state: &ThrustState) -> Vector3<f64> {
    (0..6).map(|i| engine_force(state, i)).sum()
}

/// Σ L_i × F_i by direct summation.
pub fn torque_by_summation(state: &ThrustState, geom: &HexJetGeometry) -> Vector3<f64> {
    let pos = geom.engine_positions();
    (0..6).map(|i| pos[i].cross(&engine_force(state, i))).sum()
}

/// Closed-form body force for group-mean thrusts `F_L`, `F_R`.
pub fn force_closed_form(f_left: f64, f_right: f64, alpha1: f64, alpha2: f64) -> Vector3<f64> {
    let (s1, c1) = alpha1.sin_cos();
    let (s2, c2) = alpha2.sin_cos();
    Vector3::new(3.0 * (f_left * s1 + f_right * s2), 0.0, 3.0 * (f_left * c1 + f_right * c2))
}

/// Closed-form body torque: roll from differential thrust, pitch from
/// common tilt, yaw from differential tilt.
pub fn torque_closed_form(geom: &HexJetGeometry, f_left: f64, f_right: f64, alpha1: f64, alpha2: f64) -> Vector3<f64> {
    let (s1, c1) = alpha1.sin_cos();
    let (s2, c2) = alpha2.sin_cos();
    Vector3::new(
        3.0 * geom.ly * (f_right * c2 - f_left * c1),
        3.0 * geom.lz * (f_left * s1 + f_right * s2),
        3.0 * geom.ly * (f_left * s1 - f_right * s2),
    )
}

/// Body force, rejecting tilts beyond the servo limit.
pub fn body_force(state: &ThrustState, geom: &HexJetGeometry) -> Result<Vector3<f64>> {
    state.check_tilt(geom.tilt_limit)?;
    Ok(force_by_summation(state))
}

/// Body torque, rejecting tilts beyond the servo limit.
pub fn body_torque(state: &ThrustState, geom: &HexJetGeometry) -> Result<Vector3<f64>> {
    state.check_tilt(geom.tilt_limit)?;
    Ok(torque_by_summation(state, geom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn wide() -> HexJetGeometry {
        HexJetGeometry {
            tilt_limit: std::f64::consts::FRAC_PI_2,
            ..HexJetGeometry::default()
        }
    }

    #[test]
    fn zero_tilt_force() {
        let s = ThrustState::grouped(10.0, 10.0, 0.0, 0.0);
        let f = body_force(&s, &wide()).unwrap();
        assert_relative_eq!(f, Vector3::new(0.0, 0.0, 60.0), epsilon = 1e-12);
        assert_relative_eq!(body_torque(&s, &wide()).unwrap(), Vector3::zeros(), epsilon = 1e-12);
    }

    #[test]
    fn ninety_degree_force() {
        let a = std::f64::consts::FRAC_PI_2;
        let s = ThrustState::grouped(10.0, 10.0, a, a);
        assert_relative_eq!(body_force(&s, &wide()).unwrap(), Vector3::new(60.0, 0.0, 0.0), epsilon = 1e-12);
    }

    #[test]
    fn opposite_tilt_matches_closed_form() {
        let a = 10f64.to_radians();
        let s = ThrustState::grouped(8.0, 8.0, a, -a);
        let f = force_by_summation(&s);
        assert_relative_eq!(f.x, 3.0 * 8.0 * (a.sin() + (-a).sin()), epsilon = 1e-12);
        assert_relative_eq!(f.z, 3.0 * 8.0 * (a.cos() + (-a).cos()), epsilon = 1e-12);
    }

    #[test]
    fn common_tilt_is_pure_pitch() {
        let g = wide();
        let a = 0.2;
        let s = ThrustState::grouped(9.0, 9.0, a, a);
        let t = torque_by_summation(&s, &g);
        assert!(t.z.abs() < 1e-12 && t.x.abs() < 1e-12);
        assert_relative_eq!(t.y, 6.0 * 9.0 * g.lz * a.sin(), epsilon = 1e-12);
    }

    #[test]
    fn differential_tilt_is_pure_yaw() {
        // Cross-product sign: engines on -y tilted forward push the nose
        // toward +z rotation, so yaw = +6 F L_y sin(α) for α1 = -α2 = α.
        let g = wide();
        let a = 0.2;
        let s = ThrustState::grouped(9.0, 9.0, a, -a);
        let t = torque_by_summation(&s, &g);
        assert!(t.y.abs() < 1e-12);
        assert_relative_eq!(t.z, 6.0 * 9.0 * g.ly * a.sin(), epsilon = 1e-12);
    }

    #[test]
    fn differential_thrust_is_roll() {
        let g = wide();
        let t = torque_by_summation(&ThrustState::grouped(8.0, 10.0, 0.0, 0.0), &g);
        assert_relative_eq!(t.x, 3.0 * g.ly * 2.0, epsilon = 1e-12);
    }

    #[test]
    fn tilt_limit_enforced() {
        let g = HexJetGeometry::default();
        let s = ThrustState::grouped(1.0, 1.0, 0.6, 0.0);
        assert!(matches!(body_force(&s, &g), Err(Error::TiltLimit { .. })));
        assert!(body_torque(&s, &g).is_err());
    }

    proptest! {
        #[test]
        fn closed_form_equals_summation(
            fl in 0.0f64..20.0, fr in 0.0f64..20.0, a in -0.6f64..0.6, yaw_mode in any::<bool>(),
        ) {
            let g = HexJetGeometry::default();
            let (a1, a2) = if yaw_mode { (a, -a) } else { (a, a) };
            let s = ThrustState::grouped(fl, fr, a1, a2);
            let fs = force_by_summation(&s);
            let ts = torque_by_summation(&s, &g);
            prop_assert!((fs - force_closed_form(fl, fr, a1, a2)).amax() < 1e-9);
            prop_assert!((ts - torque_closed_form(&g, fl, fr, a1, a2)).amax() < 1e-9);
            prop_assert!(fs.y.abs() < 1e-12);
        }
    }
}
