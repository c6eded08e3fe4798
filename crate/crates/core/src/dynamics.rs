//! Rigid-body rotational dynamics and attitude kinematics.
//!
//! Attitude convention: `q` is a unit quaternion (nalgebra, scalar-first
//! storage `w, i, j, k`) mapping inertial vectors into the body frame, so
//! `v_body = q * v_inertial`. A body spinning at `ω` relative to inertial
//! space sees an inertially fixed vector rotate at `-ω`, which gives the
//! kinematics `q̇ = -½ (0, ω) ⊗ q`.

use nalgebra::{Matrix3, Quaternion, SymmetricEigen, UnitQuaternion, Vector3};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;

/// Largest tolerated relative asymmetry `|I - Iᵀ| / |I|` of an inertia tensor.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BodyError {
    #[error("inertia tensor contains non-finite entries")]
    NonFinite,
    #[error("inertia tensor is not symmetric (relative asymmetry {0:.3e})")]
    Asymmetric(f64),
    #[error("inertia tensor is not positive definite (smallest principal moment {0:.6e})")]
    NotPositiveDefinite(f64),
    #[error("principal moments {0:?} violate the rigid-body triangle inequality")]
    Triangle([f64; 3]),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("non-finite attitude state at t = {t}")]
pub struct NonFiniteState {
    pub t: f64,
}

/// Mass properties of the spacecraft.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacecraftBody {
    inertia: Matrix3<f64>,
    inertia_inverse: Matrix3<f64>,
    principal_moments: [f64; 3],
}

impl SpacecraftBody {
    pub fn new(inertia: Matrix3<f64>) -> Result<Self, BodyError> {
        if inertia.iter().any(|v| !v.is_finite()) {
            return Err(BodyError::NonFinite);
        }
        let scale = inertia.norm();
        let asym = (inertia - inertia.transpose()).norm() / scale.max(f64::MIN_POSITIVE);
        if asym > SYMMETRY_TOL {
            return Err(BodyError::Asymmetric(asym));
        }
        let sym = (inertia + inertia.transpose()) * 0.5;
        let mut moments: [f64; 3] = SymmetricEigen::new(sym).eigenvalues.into();
        moments.sort_by(f64::total_cmp);
        if moments[0] <= 0.0 {
            return Err(BodyError::NotPositiveDefinite(moments[0]));
        }
        // Largest moment bounded by the sum of the other two; allow roundoff.
        if moments[2] > (moments[0] + moments[1]) * (1.0 + 1e-12) {
            return Err(BodyError::Triangle(moments));
        }
        let inertia_inverse = sym
            .try_inverse()
            .ok_or(BodyError::NotPositiveDefinite(moments[0]))?;
        Ok(Self {
            inertia: sym,
            inertia_inverse,
            principal_moments: moments,
        })
    }

    pub fn diagonal(ixx: f64, iyy: f64, izz: f64) -> Result<Self, BodyError> {
        Self::new(Matrix3::from_diagonal(&Vec3::new(ixx, iyy, izz)))
    }

    /// Spherically symmetric body, `I = moment · 1₃`.
    pub fn spherical(moment: f64) -> Result<Self, BodyError> {
        Self::diagonal(moment, moment, moment)
    }

    pub fn inertia(&self) -> &Matrix3<f64> {
        &self.inertia
    }

    pub fn inertia_inverse(&self) -> &Matrix3<f64> {
        &self.inertia_inverse
    }

    /// Principal moments in ascending order.
    pub fn principal_moments(&self) -> [f64; 3] {
        self.principal_moments
    }

    /// Smallest principal moment.
    pub fn j_min(&self) -> f64 {
        self.principal_moments[0]
    }
}

/// Attitude and body rate at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeState {
    /// Body-from-inertial rotation.
    pub q: UnitQuaternion<f64>,
    /// Body-frame angular velocity relative to inertial space, rad/s.
    pub omega: Vec3,
    pub t: f64,
}

impl AttitudeState {
    pub fn new(q: UnitQuaternion<f64>, omega: Vec3, t: f64) -> Self {
        Self { q, omega, t }
    }

    pub fn is_finite(&self) -> bool {
        self.q.coords.iter().all(|v| v.is_finite())
            && self.omega.iter().all(|v| v.is_finite())
            && self.t.is_finite()
    }
}

/// `ω × (I ω)`.
pub fn gyroscopic_term(omega: &Vec3, body: &SpacecraftBody) -> Vec3 {
    omega.cross(&(body.inertia * omega))
}

/// Euler's equation `ω̇ = I⁻¹ [Γ − ω × (I ω)]`.
pub fn euler_rhs(state: &AttitudeState, torque: &Vec3, body: &SpacecraftBody) -> Vec3 {
    omega_dot(&state.omega, torque, body)
}

fn omega_dot(omega: &Vec3, torque: &Vec3, body: &SpacecraftBody) -> Vec3 {
    body.inertia_inverse * (torque - gyroscopic_term(omega, body))
}

/// Time derivative of the body-from-inertial quaternion, `-½ (0, ω) ⊗ q`.
pub fn quaternion_rate(q: &Quaternion<f64>, omega: &Vec3) -> Quaternion<f64> {
    Quaternion::from_imag(*omega) * q * -0.5
}

/// `A_BI · v`: express an inertial vector in the body frame.
pub fn rotate_to_body(q: &UnitQuaternion<f64>, v_inertial: &Vec3) -> Vec3 {
    q.transform_vector(v_inertial)
}

/// `A_BIᵀ · v`: express a body vector in the inertial frame.
pub fn rotate_to_inertial(q: &UnitQuaternion<f64>, v_body: &Vec3) -> Vec3 {
    q.inverse_transform_vector(v_body)
}

/// One classical RK4 step of `(q, ω)` over `h` seconds.
///
/// `torque_fn` is evaluated at each of the four stage states (stage
/// quaternions are normalized before the call). The returned quaternion
/// is renormalized.
pub fn rk4_step<F>(
    state: &AttitudeState,
    mut torque_fn: F,
    body: &SpacecraftBody,
    h: f64,
) -> Result<AttitudeState, NonFiniteState>
where
    F: FnMut(&AttitudeState) -> Vec3,
{
    debug_assert!(h > 0.0, "rk4_step requires h > 0");
    if !state.is_finite() {
        return Err(NonFiniteState { t: state.t });
    }
    let q0 = *state.q.quaternion();
    let w0 = state.omega;

    let mut deriv = |q: Quaternion<f64>, w: Vec3, t: f64| {
        let stage = AttitudeState::new(UnitQuaternion::new_normalize(q), w, t);
        let torque = torque_fn(&stage);
        (quaternion_rate(&q, &w), omega_dot(&w, &torque, body))
    };

    let (kq1, kw1) = deriv(q0, w0, state.t);
    let (kq2, kw2) = deriv(q0 + kq1 * (0.5 * h), w0 + kw1 * (0.5 * h), state.t + 0.5 * h);
    let (kq3, kw3) = deriv(q0 + kq2 * (0.5 * h), w0 + kw2 * (0.5 * h), state.t + 0.5 * h);
    let (kq4, kw4) = deriv(q0 + kq3 * h, w0 + kw3 * h, state.t + h);

    let q1 = q0 + (kq1 + kq2 * 2.0 + kq3 * 2.0 + kq4) * (h / 6.0);
    let w1 = w0 + (kw1 + kw2 * 2.0 + kw3 * 2.0 + kw4) * (h / 6.0);

    let next = AttitudeState::new(UnitQuaternion::new_normalize(q1), w1, state.t + h);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(NonFiniteState { t: state.t })
    }
}

/// Rotational kinetic energy `½ ωᵀ I ω`.
pub fn kinetic_energy(omega: &Vec3, body: &SpacecraftBody) -> f64 {
    0.5 * omega.dot(&(body.inertia * omega))
}

/// Angular momentum expressed in the inertial frame, `A_BIᵀ (I ω)`.
pub fn inertial_momentum(state: &AttitudeState, body: &SpacecraftBody) -> Vec3 {
    rotate_to_inertial(&state.q, &(body.inertia * state.omega))
}
