//! Magnetic detumbling control laws.
//!
//! Both laws produce a dipole moment `m` (A·m²) that the harness holds
//! constant in the body frame over one control interval. Torque is always
//! `m × b`, so nothing here can act along the field.

use std::f64::consts::PI;

use thiserror::Error;

use crate::dynamics::Vec3;
use crate::geomag::OrbitConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("magnetic field sample has zero (or non-finite) magnitude")]
    ZeroField,
    #[error("control timestep must be positive and finite, got {0}")]
    Timestep(f64),
    #[error("gain must be non-negative and finite, got {0}")]
    Gain(f64),
    #[error("moment cap must be positive, got {0}")]
    MomentCap(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// `m = (k_c/‖b‖²)(ω × b)`.
    OmegaCrossB,
    /// `m = -(k_c/‖b‖²) ḃ` with a backward-difference `ḃ`.
    BDot,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::OmegaCrossB => "omega_cross_b",
            Algorithm::BDot => "bdot",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "omega_cross_b" | "wxb" => Ok(Algorithm::OmegaCrossB),
            "bdot" => Ok(Algorithm::BDot),
            other => Err(format!(
                "unknown algorithm `{other}` (expected \"omega_cross_b\" or \"bdot\")"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub algorithm: Algorithm,
    /// Gain, N·m·s.
    pub k_c: f64,
    /// Control (and sampling) interval, s.
    pub dt: f64,
    /// Optional bound on `‖m‖`, A·m².
    pub moment_cap: Option<f64>,
}

impl ControllerConfig {
    pub fn new(algorithm: Algorithm, k_c: f64, dt: f64) -> Result<Self, ControlError> {
        let cfg = Self {
            algorithm,
            k_c,
            dt,
            moment_cap: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_moment_cap(mut self, cap: f64) -> Result<Self, ControlError> {
        self.moment_cap = Some(cap);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(ControlError::Timestep(self.dt));
        }
        if !(self.k_c.is_finite() && self.k_c >= 0.0) {
            return Err(ControlError::Gain(self.k_c));
        }
        if let Some(cap) = self.moment_cap {
            if !(cap.is_finite() && cap > 0.0) {
                return Err(ControlError::MomentCap(cap));
            }
        }
        Ok(())
    }

    /// Moment for the current control instant.
    ///
    /// `b_prev` is the body-frame field sampled one interval earlier; B-dot
    /// commands zero moment when it is `None`.
    pub fn command(
        &self,
        omega: &Vec3,
        b_body: &Vec3,
        b_prev: Option<&Vec3>,
    ) -> Result<ControlCommand, ControlError> {
        let raw = match self.algorithm {
            Algorithm::OmegaCrossB => omega_cross_b_moment(omega, b_body, self.k_c)?,
            Algorithm::BDot => match b_prev {
                Some(prev) => bdot_moment(b_body, prev, self.dt, self.k_c)?,
                None => {
                    field_norm_sq(b_body)?;
                    Vec3::zeros()
                }
            },
        };
        Ok(ControlCommand::new(raw, self.moment_cap))
    }
}

/// Dipole moment held over one control interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlCommand {
    pub moment: Vec3,
}

impl ControlCommand {
    /// Scales `moment` down onto the cap when it exceeds it.
    pub fn new(moment: Vec3, cap: Option<f64>) -> Self {
        let moment = match cap {
            Some(cap) if moment.norm() > cap => moment * (cap / moment.norm()),
            _ => moment,
        };
        Self { moment }
    }
}

fn field_norm_sq(b: &Vec3) -> Result<f64, ControlError> {
    let n2 = b.norm_squared();
    if n2 > 0.0 && n2.is_finite() {
        Ok(n2)
    } else {
        Err(ControlError::ZeroField)
    }
}

pub fn omega_cross_b_moment(omega: &Vec3, b_body: &Vec3, k_c: f64) -> Result<Vec3, ControlError> {
    let n2 = field_norm_sq(b_body)?;
    Ok(omega.cross(b_body) * (k_c / n2))
}

/// B-dot moment from two successive body-frame field samples.
///
/// The normalization uses the current sample `b_k`.
pub fn bdot_moment(b_k: &Vec3, b_prev: &Vec3, dt: f64, k_c: f64) -> Result<Vec3, ControlError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ControlError::Timestep(dt));
    }
    let n2 = field_norm_sq(b_k)?;
    let b_dot = (b_k - b_prev) / dt;
    Ok(b_dot * (-k_c / n2))
}

/// Gain `(4π/T_orb)(1 + sin ξ) J_min`.
pub fn avanzini_gain(orbit: &OrbitConfig, j_min: f64) -> f64 {
    4.0 * PI / orbit.t_orb * (1.0 + orbit.xi.sin()) * j_min
}

/// `m × b`.
pub fn magnetic_torque(moment: &Vec3, b_body: &Vec3) -> Vec3 {
    moment.cross(b_body)
}

/// `-k_c (1₃ − b̂ b̂ᵀ) ω`, the torque of the ω×b law written as a projection.
pub fn projection_torque(omega: &Vec3, b_body: &Vec3, k_c: f64) -> Result<Vec3, ControlError> {
    let n2 = field_norm_sq(b_body)?;
    let along = b_body * (b_body.dot(omega) / n2);
    Ok((omega - along) * -k_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Matrix3;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn vec3() -> impl Strategy<Value = Vec3> {
        prop::array::uniform3(-10.0f64..10.0).prop_map(Vec3::from)
    }

    fn field() -> impl Strategy<Value = Vec3> {
        vec3().prop_filter("nonzero field", |b| b.norm() > 1e-3)
    }

    // Body-frame field after a spin of `angle` about z.
    fn spun(b: &Vec3, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        Matrix3::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0) * b
    }

    #[test]
    fn omega_cross_b_examples() {
        let b = Vec3::new(2.0, 0.0, 0.0);
        assert_eq!(omega_cross_b_moment(&(b * 3.0), &b, 1.0).unwrap(), Vec3::zeros());
        let m = omega_cross_b_moment(&Vec3::z(), &b, 1.0).unwrap();
        assert_eq!(m, Vec3::new(0.0, 0.5, 0.0));
        assert_eq!(magnetic_torque(&m, &b), Vec3::new(0.0, 0.0, -1.0));
        assert_eq!(
            omega_cross_b_moment(&Vec3::z(), &Vec3::zeros(), 1.0),
            Err(ControlError::ZeroField)
        );
    }

    #[test]
    fn bdot_examples() {
        let b = Vec3::new(1e-5, 2e-5, 0.0);
        assert_eq!(bdot_moment(&b, &b, 0.5, 2.0).unwrap(), Vec3::zeros());
        assert_eq!(bdot_moment(&Vec3::zeros(), &b, 0.5, 2.0), Err(ControlError::ZeroField));
        assert!(bdot_moment(&b, &b, 0.0, 2.0).is_err());
    }

    #[test]
    fn bdot_approaches_omega_cross_b_for_small_rotation() {
        let w = 0.1;
        let dt = 1e-2; // w·dt = 1e-3
        let b_prev = Vec3::new(3e-5, -1e-5, 2e-5);
        let b_k = spun(&b_prev, w * dt);
        let omega = Vec3::new(0.0, 0.0, w);
        let bdot = bdot_moment(&b_k, &b_prev, dt, 0.7).unwrap();
        let wxb = omega_cross_b_moment(&omega, &b_k, 0.7).unwrap();
        let rel = (bdot - wxb).norm() / wxb.norm();
        assert!(rel < 2.0 * w * dt, "relative error {rel}");
        assert!(rel > 0.1 * w * dt, "first-order error expected, got {rel}");
    }

    #[test]
    fn bdot_half_turn_commands_moment_along_field() {
        let b_prev = Vec3::new(1.0, 0.5, 0.0);
        let b_k = spun(&b_prev, PI);
        assert_relative_eq!(b_k - b_prev, b_prev * -2.0, epsilon = 1e-15);
        let m = bdot_moment(&b_k, &b_prev, 1.0, 1.0).unwrap();
        assert!(m.dot(&b_prev) > 0.0);
        assert!(m.cross(&b_prev).norm() < 1e-15);
        assert!(magnetic_torque(&m, &b_k).norm() < 1e-15);
    }

    #[test]
    fn avanzini_examples() {
        let polar = OrbitConfig::new(5400.0, FRAC_PI_2).unwrap();
        let k = avanzini_gain(&polar, 0.01);
        assert_relative_eq!(k, 4.0 * PI / 5400.0 * 2.0 * 0.01, max_relative = 1e-15);
        assert_relative_eq!(k, 4.654e-5, max_relative = 1e-3);
        let equatorial = OrbitConfig::new(5400.0, 0.0).unwrap();
        assert_relative_eq!(avanzini_gain(&equatorial, 0.01), k / 2.0, max_relative = 1e-15);
        assert_relative_eq!(avanzini_gain(&polar, 0.03), 3.0 * k, max_relative = 1e-15);
    }

    #[test]
    fn projection_examples() {
        let b = Vec3::new(0.0, 3.0, 0.0);
        assert_eq!(projection_torque(&(b * 0.2), &b, 1.5).unwrap(), Vec3::zeros());
        let w = Vec3::new(0.4, 0.0, -0.7);
        assert_eq!(projection_torque(&w, &b, 1.5).unwrap(), w * -1.5);
        assert_eq!(projection_torque(&w, &Vec3::zeros(), 1.5), Err(ControlError::ZeroField));
    }

    #[test]
    fn command_handles_first_bdot_sample_and_cap() {
        let cfg = ControllerConfig::new(Algorithm::BDot, 1.0, 0.1).unwrap();
        let b = Vec3::new(1.0, 0.0, 0.0);
        assert_eq!(cfg.command(&Vec3::z(), &b, None).unwrap().moment, Vec3::zeros());
        assert!(cfg.command(&Vec3::z(), &Vec3::zeros(), None).is_err());

        let capped = ControllerConfig::new(Algorithm::OmegaCrossB, 10.0, 0.1)
            .unwrap()
            .with_moment_cap(0.2)
            .unwrap();
        let m = capped.command(&Vec3::z(), &b, None).unwrap().moment;
        assert_relative_eq!(m.norm(), 0.2, max_relative = 1e-15);
        assert!(m.y > 0.0);
    }

    #[test]
    fn config_validation() {
        assert_eq!(
            ControllerConfig::new(Algorithm::BDot, 1.0, 0.0),
            Err(ControlError::Timestep(0.0))
        );
        assert_eq!(
            ControllerConfig::new(Algorithm::BDot, -1.0, 1.0),
            Err(ControlError::Gain(-1.0))
        );
        assert!(ControllerConfig::new(Algorithm::BDot, 1.0, 1.0)
            .unwrap()
            .with_moment_cap(0.0)
            .is_err());
        assert_eq!("bdot".parse::<Algorithm>(), Ok(Algorithm::BDot));
        assert!("pid".parse::<Algorithm>().is_err());
    }

    proptest! {
        #[test]
        fn torque_has_no_component_along_field(m in vec3(), b in field()) {
            let torque = magnetic_torque(&m, &b);
            prop_assert!(torque.dot(&b).abs() <= 1e-12 * (1.0 + m.norm() * b.norm() * b.norm()));
        }

        #[test]
        fn projection_equals_composed_law(w in vec3(), b in field(), k in 0.0f64..5.0) {
            let composed = magnetic_torque(&omega_cross_b_moment(&w, &b, k).unwrap(), &b);
            let projected = projection_torque(&w, &b, k).unwrap();
            prop_assert!((composed - projected).norm() <= 1e-12 * (1.0 + k * w.norm()));
        }

        #[test]
        fn projection_torque_dissipates(w in vec3(), b in field(), k in 0.0f64..5.0) {
            let torque = projection_torque(&w, &b, k).unwrap();
            prop_assert!(torque.dot(&w) <= 1e-12 * (1.0 + k * w.norm_squared()));
        }

        #[test]
        fn capped_moment_respects_cap(m in vec3(), cap in 0.01f64..5.0) {
            prop_assert!(ControlCommand::new(m, Some(cap)).moment.norm() <= cap * (1.0 + 1e-15));
        }
    }
}
