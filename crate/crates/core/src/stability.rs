//! Energy monitoring and the sampled-data instability criteria.
//!
//! Three mechanisms make a magnetic detumbling loop misbehave once it runs
//! at a finite control interval `Δt`:
//!
//! * **Type I** (overshoot): the held torque over one interval more than
//!   reverses a velocity component, `k_c Δt / I > 2`.
//! * **Type II** (aliasing, B-dot only): the field turns by more than π per
//!   sample, so the finite difference reports the wrong rotation sense.
//!   Equilibria sit at `nπ/Δt`; even multiples attract, odd ones repel.
//! * **Type III** (hold interval): the field rotates past the fixed moment
//!   during the interval; to first order `Δω = -k_c sin(ω Δt)`.

use std::f64::consts::PI;

use crate::control::{Algorithm, ControllerConfig};
use crate::dynamics::{SpacecraftBody, Vec3};

pub use crate::dynamics::kinetic_energy;

/// `V̇ = ωᵀ Γ`.
pub fn lyapunov_rate(omega: &Vec3, torque: &Vec3) -> f64 {
    omega.dot(torque)
}

/// `V(ω_{k+1}) − V(ω_k)`; positive means the step added energy.
pub fn discrete_lyapunov_delta(omega_k: &Vec3, omega_k1: &Vec3, body: &SpacecraftBody) -> f64 {
    kinetic_energy(omega_k1, body) - kinetic_energy(omega_k, body)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Type1Result {
    pub unstable: bool,
    /// `k_c Δt / I_min − 2`; positive is unstable.
    pub margin: f64,
}

/// Overshoot criterion evaluated on the smallest principal moment.
pub fn type1_criterion(k_c: f64, dt: f64, body: &SpacecraftBody) -> Type1Result {
    let margin = k_c * dt / body.j_min() - 2.0;
    Type1Result {
        unstable: margin > 0.0,
        margin,
    }
}

/// Per-component flip-and-grow test: the kick `(Γ/I)Δt` opposes `ω⊥` and is
/// more than twice its size, so the component reverses and gets larger.
pub fn type1_componentwise(torque_component: f64, i_axis: f64, dt: f64, omega_perp_component: f64) -> bool {
    let kick = torque_component / i_axis * dt;
    kick * omega_perp_component < 0.0 && kick.abs() > 2.0 * omega_perp_component.abs()
}

/// Angular acceleration about z at a control instant under B-dot.
///
/// Returns `-C sin(ω_z Δt)` with `C = k_c (b_x² + b_y²) / (Δt I ‖b‖²)`. The
/// `‖b‖²` normalization follows from the control law's `1/‖b‖²` factor.
pub fn bdot_phase_acceleration(omega_z: f64, dt: f64, k_c: f64, inertia: f64, b: &Vec3) -> f64 {
    -bdot_phase_constant(dt, k_c, inertia, b) * (omega_z * dt).sin()
}

pub fn bdot_phase_constant(dt: f64, k_c: f64, inertia: f64, b: &Vec3) -> f64 {
    k_c * (b.x * b.x + b.y * b.y) / (dt * inertia * b.norm_squared())
}

/// Evenly spaced `(ω_z, ω̇_z)` samples of the B-dot phase portrait on `[0, omega_max]`.
pub fn phase_portrait(
    dt: f64,
    k_c: f64,
    inertia: f64,
    b: &Vec3,
    omega_max: f64,
    points: usize,
) -> Vec<(f64, f64)> {
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let w = omega_max * i as f64 / (n - 1) as f64;
            (w, bdot_phase_acceleration(w, dt, k_c, inertia, b))
        })
        .collect()
}

/// Largest control interval that avoids aliasing the field rotation, `π/‖ω‖`.
///
/// Returns `f64::INFINITY` for a body at rest.
pub fn type2_max_dt(omega: &Vec3) -> f64 {
    let w = omega.norm();
    if w > 0.0 {
        PI / w
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSet {
    /// Even multiples of `π/Δt`, ascending, starting at 0.
    pub stable_points: Vec<f64>,
    /// Odd multiples of `π/Δt`, ascending.
    pub unstable_points: Vec<f64>,
    pub omega_max: f64,
}

impl EquilibriumSet {
    /// Stable equilibrium whose basin contains `omega` (basins are bounded by
    /// the neighbouring unstable points).
    pub fn attractor_of(&self, omega: f64, dt: f64) -> f64 {
        let n = (omega * dt / (2.0 * PI)).round();
        2.0 * PI * n / dt
    }
}

/// Equilibria of the B-dot phase portrait in `[0, omega_max]`.
pub fn classify_equilibria(dt: f64, omega_max: f64) -> EquilibriumSet {
    let mut stable_points = Vec::new();
    let mut unstable_points = Vec::new();
    let step = PI / dt;
    let mut n = 0u64;
    loop {
        let w = n as f64 * step;
        if w > omega_max {
            break;
        }
        if n % 2 == 0 {
            stable_points.push(w);
        } else {
            unstable_points.push(w);
        }
        n += 1;
    }
    EquilibriumSet {
        stable_points,
        unstable_points,
        omega_max,
    }
}

/// One-interval change in rate with the field angle advancing at the
/// initial rate, `-k_c sin(ω_i Δt)`. `k_c` here is per unit inertia.
pub fn type3_delta_omega(omega_i: f64, dt: f64, k_c: f64) -> f64 {
    -k_c * (omega_i * dt).sin()
}

/// Pre-flight evaluation of all three criteria for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub omega_norm: f64,
    pub algorithm: Algorithm,
    pub dt: f64,
    pub type1_unstable: bool,
    pub type1_margin: f64,
    pub type2_max_dt: f64,
    /// Always false for ω×b, which does not difference the field.
    pub type2_violated: bool,
    pub type3_delta_omega_pred: f64,
    pub type3_violated: bool,
    pub recommended_entry: bool,
}

impl StabilityReport {
    pub fn violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.type1_unstable {
            v.push("type1");
        }
        if self.type2_violated {
            v.push("type2");
        }
        if self.type3_violated {
            v.push("type3");
        }
        v
    }
}

/// Decide whether detumbling should start at rate `omega`.
///
/// Type III is judged on `‖ω‖Δt`: the predicted change is a decrease only
/// while the field turns by less than π per interval.
pub fn entry_check(omega: &Vec3, config: &ControllerConfig, body: &SpacecraftBody) -> StabilityReport {
    let t1 = type1_criterion(config.k_c, config.dt, body);
    let w = omega.norm();
    let max_dt = type2_max_dt(omega);
    let type2_violated = config.algorithm == Algorithm::BDot && config.dt >= max_dt;
    let pred = type3_delta_omega(w, config.dt, config.k_c / body.j_min());
    let type3_violated = w > 0.0 && w * config.dt >= PI;
    StabilityReport {
        omega_norm: w,
        algorithm: config.algorithm,
        dt: config.dt,
        type1_unstable: t1.unstable,
        type1_margin: t1.margin,
        type2_max_dt: max_dt,
        type2_violated,
        type3_delta_omega_pred: pred,
        type3_violated,
        recommended_entry: !(t1.unstable || type2_violated || type3_violated),
    }
}
