//! Inertial-frame geomagnetic field models.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Rotation3, Vector3};

use crate::dynamics::Vec3;

/// Earth gravitational parameter, m³/s².
pub const MU_EARTH: f64 = 3.986_004_418e14;
/// Mean Earth radius used by the dipole model, m.
pub const EARTH_RADIUS: f64 = 6_371_200.0;
/// Equatorial surface field of the centered dipole, T.
pub const EQUATORIAL_SURFACE_FIELD: f64 = 3.12e-5;
/// Dipole strength giving [`EQUATORIAL_SURFACE_FIELD`] at [`EARTH_RADIUS`], T·m³.
pub const DEFAULT_DIPOLE_STRENGTH: f64 =
    EQUATORIAL_SURFACE_FIELD * EARTH_RADIUS * EARTH_RADIUS * EARTH_RADIUS;

/// Source of the inertial magnetic field `b_I(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldModel {
    /// Constant inertial field.
    StaticInertial { b0: Vec3 },
    /// `b0` rotated about `axis` by `rate · t`.
    PlanarRotating { b0: Vec3, axis: Vec3, rate: f64 },
    /// Centered dipole, fixed in inertial space, sampled along a circular orbit.
    ///
    /// The orbit ascends through inertial +x at `t = 0` when `orbit_phase0 = 0`.
    /// The dipole moment points along `-z` tilted by `dipole_tilt` toward `+x`
    /// (the geomagnetic north pole is a magnetic south pole).
    TiltedDipole {
        orbit_radius: f64,
        inclination: f64,
        orbit_phase0: f64,
        dipole_tilt: f64,
        dipole_strength: f64,
    },
}

/// Orbit parameters used by the gain law and the field-rate estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitConfig {
    /// Orbital period, s.
    pub t_orb: f64,
    /// Inclination relative to the geomagnetic equator, rad, in `[0, π/2]`.
    pub xi: f64,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("orbital period must be positive and finite, got {0}")]
    Period(f64),
    #[error("inclination must lie in [0, pi/2], got {0}")]
    Inclination(f64),
}

impl OrbitConfig {
    pub fn new(t_orb: f64, xi: f64) -> Result<Self, OrbitError> {
        if !(t_orb.is_finite() && t_orb > 0.0) {
            return Err(OrbitError::Period(t_orb));
        }
        if !(0.0..=FRAC_PI_2).contains(&xi) {
            return Err(OrbitError::Inclination(xi));
        }
        Ok(Self { t_orb, xi })
    }

    /// Circular-orbit radius with this period.
    pub fn radius(&self) -> f64 {
        let n = 2.0 * PI / self.t_orb;
        (MU_EARTH / (n * n)).cbrt()
    }
}

/// Circular-orbit period at radius `r`.
pub fn orbital_period(radius: f64) -> f64 {
    2.0 * PI * (radius.powi(3) / MU_EARTH).sqrt()
}

impl FieldModel {
    /// Dipole field along a circular LEO orbit with the textbook dipole strength.
    pub fn leo_dipole(altitude: f64, inclination: f64) -> Self {
        FieldModel::TiltedDipole {
            orbit_radius: EARTH_RADIUS + altitude,
            inclination,
            orbit_phase0: 0.0,
            dipole_tilt: 0.0,
            dipole_strength: DEFAULT_DIPOLE_STRENGTH,
        }
    }

    /// `b_I(t)`, tesla.
    pub fn field_inertial(&self, t: f64) -> Vec3 {
        match *self {
            FieldModel::StaticInertial { b0 } => b0,
            FieldModel::PlanarRotating { b0, axis, rate } => {
                let axis = nalgebra::Unit::new_normalize(axis);
                Rotation3::from_axis_angle(&axis, rate * t) * b0
            }
            FieldModel::TiltedDipole {
                orbit_radius,
                inclination,
                orbit_phase0,
                dipole_tilt,
                dipole_strength,
            } => {
                let r_hat = orbit_direction(orbit_radius, inclination, orbit_phase0, t);
                let m_hat = dipole_axis(dipole_tilt);
                dipole_field(&m_hat, &r_hat, orbit_radius, dipole_strength)
            }
        }
    }

    /// Mean angular rate of the field direction `b̂_I`, rad/s.
    ///
    /// For the dipole the rate is averaged over one period `orbit.t_orb` by
    /// summing the angle between closely spaced samples.
    pub fn effective_rotation_rate(&self, orbit: &OrbitConfig) -> f64 {
        match *self {
            FieldModel::StaticInertial { .. } => 0.0,
            FieldModel::PlanarRotating { b0, axis, rate } => {
                // Only the part of b0 off the axis sweeps; the direction rate
                // is scaled by sin of the cone half-angle.
                let sin_cone = b0.normalize().cross(&axis.normalize()).norm();
                if sin_cone > 1.0 - 1e-12 {
                    rate.abs()
                } else {
                    mean_direction_rate(self, orbit.t_orb)
                }
            }
            FieldModel::TiltedDipole { .. } => mean_direction_rate(self, orbit.t_orb),
        }
    }
}

fn mean_direction_rate(model: &FieldModel, window: f64) -> f64 {
    const SAMPLES: usize = 7200;
    let dt = window / SAMPLES as f64;
    let mut prev = model.field_inertial(0.0).normalize();
    let mut swept = 0.0;
    for i in 1..=SAMPLES {
        let next = model.field_inertial(i as f64 * dt).normalize();
        swept += prev.cross(&next).norm().atan2(prev.dot(&next));
        prev = next;
    }
    swept / window
}

fn orbit_direction(radius: f64, inclination: f64, phase0: f64, t: f64) -> Vec3 {
    let mean_motion = (MU_EARTH / radius.powi(3)).sqrt();
    let u = phase0 + mean_motion * t;
    let (su, cu) = u.sin_cos();
    let (si, ci) = inclination.sin_cos();
    Vector3::new(cu, ci * su, si * su)
}

fn dipole_axis(tilt: f64) -> Vec3 {
    let (s, c) = tilt.sin_cos();
    Vector3::new(s, 0.0, -c)
}

/// `B = (strength / r³) [3 (m̂·r̂) r̂ − m̂]`.
fn dipole_field(m_hat: &Vec3, r_hat: &Vec3, radius: f64, strength: f64) -> Vec3 {
    (r_hat * (3.0 * m_hat.dot(r_hat)) - m_hat) * (strength / radius.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn static_field_is_constant() {
        let m = FieldModel::StaticInertial {
            b0: Vec3::new(30e-6, 0.0, 0.0),
        };
        for t in [-5.0, 0.0, 17.3, 1e6] {
            assert_eq!(m.field_inertial(t), Vec3::new(30e-6, 0.0, 0.0));
        }
    }

    #[test]
    fn planar_rotating_is_periodic_and_norm_preserving() {
        let rate = 2e-3;
        let m = FieldModel::PlanarRotating {
            b0: Vec3::new(2e-5, 1e-5, -3e-5),
            axis: Vec3::new(0.0, 0.3, 1.0),
            rate,
        };
        let b0 = m.field_inertial(0.0);
        assert_relative_eq!(m.field_inertial(2.0 * PI / rate), b0, epsilon = 1e-12);
        for t in [1.0, 100.0, 1234.5] {
            assert_relative_eq!(m.field_inertial(t).norm(), b0.norm(), max_relative = 1e-14);
        }
    }

    #[test]
    fn equatorial_dipole_magnitude() {
        let r = 6.9e6;
        let strength = DEFAULT_DIPOLE_STRENGTH;
        let m = FieldModel::TiltedDipole {
            orbit_radius: r,
            inclination: 0.0,
            orbit_phase0: 0.3,
            dipole_tilt: 0.0,
            dipole_strength: strength,
        };
        for t in [0.0, 500.0, 2500.0] {
            let latitude: f64 = 0.0;
            let oracle = strength / r.powi(3) * (1.0 + 3.0 * latitude.sin().powi(2)).sqrt();
            assert_relative_eq!(m.field_inertial(t).norm(), oracle, max_relative = 1e-12);
        }
        // Textbook surface value at the equator.
        let surface = FieldModel::TiltedDipole {
            orbit_radius: EARTH_RADIUS,
            inclination: 0.0,
            orbit_phase0: 0.0,
            dipole_tilt: 0.0,
            dipole_strength: DEFAULT_DIPOLE_STRENGTH,
        };
        assert_relative_eq!(surface.field_inertial(0.0).norm(), 3.12e-5, max_relative = 1e-12);
    }

    #[test]
    fn polar_dipole_magnitude_follows_latitude() {
        let r = 7.0e6;
        let m = FieldModel::TiltedDipole {
            orbit_radius: r,
            inclination: FRAC_PI_2,
            orbit_phase0: 0.0,
            dipole_tilt: 0.0,
            dipole_strength: DEFAULT_DIPOLE_STRENGTH,
        };
        let period = orbital_period(r);
        for frac in [0.05, 0.1, 0.2, 0.25, 0.6] {
            let lat = 2.0 * PI * frac; // argument of latitude equals magnetic latitude here
            let oracle = DEFAULT_DIPOLE_STRENGTH / r.powi(3) * (1.0 + 3.0 * lat.sin().powi(2)).sqrt();
            assert_relative_eq!(m.field_inertial(frac * period).norm(), oracle, max_relative = 1e-12);
        }
    }

    #[test]
    fn dipole_is_periodic_and_continuous() {
        let m = FieldModel::TiltedDipole {
            orbit_radius: 6.95e6,
            inclination: 1.7,
            orbit_phase0: 0.4,
            dipole_tilt: 0.2,
            dipole_strength: DEFAULT_DIPOLE_STRENGTH,
        };
        let period = orbital_period(6.95e6);
        for t in [0.0, 123.0, 4000.0] {
            let a = m.field_inertial(t);
            let b = m.field_inertial(t + period);
            assert!((a - b).norm() <= 1e-9 * a.norm());
            let near = m.field_inertial(t + 1e-6);
            assert!((near - a).norm() < 1e-6 * a.norm());
        }
    }

    #[test]
    fn rotation_rates() {
        let orbit = OrbitConfig::new(5400.0, FRAC_PI_2).unwrap();
        let stat = FieldModel::StaticInertial { b0: Vec3::x() };
        assert_eq!(stat.effective_rotation_rate(&orbit), 0.0);
        let planar = FieldModel::PlanarRotating {
            b0: Vec3::x(),
            axis: Vec3::z(),
            rate: 2e-3,
        };
        assert_relative_eq!(planar.effective_rotation_rate(&orbit), 2e-3, max_relative = 1e-12);

        let polar = FieldModel::TiltedDipole {
            orbit_radius: orbit.radius(),
            inclination: FRAC_PI_2,
            orbit_phase0: 0.0,
            dipole_tilt: 0.0,
            dipole_strength: DEFAULT_DIPOLE_STRENGTH,
        };
        let rate = polar.effective_rotation_rate(&orbit);
        let orbital_rate = 2.0 * PI / 5400.0;
        assert_relative_eq!(rate, 2.0 * orbital_rate, max_relative = 1e-6);
        assert!((2.0e-3..2.6e-3).contains(&rate));
    }

    #[test]
    fn orbit_validation() {
        assert!(OrbitConfig::new(0.0, 0.1).is_err());
        assert!(OrbitConfig::new(5400.0, 2.0).is_err());
        let o = OrbitConfig::new(5400.0, 0.0).unwrap();
        assert_relative_eq!(orbital_period(o.radius()), 5400.0, max_relative = 1e-12);
    }
}
