//! Closed-loop sampled-data simulation and parameter sweeps.
//!
//! At each control instant the harness samples the body-frame field,
//! computes a moment, and holds that moment fixed in the body frame while
//! RK4 advances the attitude over the interval in `substeps` pieces.

use std::f64::consts::PI;

use nalgebra::{Quaternion, UnitQuaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::control::{magnetic_torque, ControlError, ControllerConfig};
use crate::dynamics::{rk4_step, rotate_to_body, AttitudeState, SpacecraftBody, Vec3};
use crate::geomag::FieldModel;
use crate::stability::kinetic_energy;

pub const DEFAULT_SUBSTEPS: usize = 20;

/// How the torque behaves inside a hold interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TorqueHold {
    /// Moment fixed, torque `m × b_body(t)` re-evaluated every RK4 stage.
    #[default]
    Varying,
    /// Torque frozen at its value at the start of the interval.
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialAttitude {
    Fixed(UnitQuaternion<f64>),
    /// Uniformly random attitude drawn from the config seed.
    Random,
}

impl Default for InitialAttitude {
    fn default() -> Self {
        InitialAttitude::Fixed(UnitQuaternion::identity())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub body: SpacecraftBody,
    pub controller: ControllerConfig,
    pub field: FieldModel,
    pub initial_omega: Vec3,
    pub initial_attitude: InitialAttitude,
    pub duration: f64,
    pub substeps: usize,
    pub torque_hold: TorqueHold,
    pub seed: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("duration ({duration}) must be at least controller.dt ({dt})")]
    DurationShorterThanStep { duration: f64, dt: f64 },
    #[error("substeps must be at least 1")]
    Substeps,
    #[error("initial angular velocity must be finite")]
    InitialOmega,
    #[error(transparent)]
    Controller(#[from] ControlError),
}

impl SimConfig {
    pub fn new(
        body: SpacecraftBody,
        controller: ControllerConfig,
        field: FieldModel,
        initial_omega: Vec3,
        duration: f64,
    ) -> Self {
        Self {
            body,
            controller,
            field,
            initial_omega,
            initial_attitude: InitialAttitude::default(),
            duration,
            substeps: DEFAULT_SUBSTEPS,
            torque_hold: TorqueHold::Varying,
            seed: 0,
        }
    }

    pub fn with_torque_hold(mut self, hold: TorqueHold) -> Self {
        self.torque_hold = hold;
        self
    }

    pub fn with_substeps(mut self, substeps: usize) -> Self {
        self.substeps = substeps;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.controller.validate()?;
        if self.substeps == 0 {
            return Err(ConfigError::Substeps);
        }
        if !self.initial_omega.iter().all(|v| v.is_finite()) {
            return Err(ConfigError::InitialOmega);
        }
        if !(self.duration >= self.controller.dt * (1.0 - 1e-12)) {
            return Err(ConfigError::DurationShorterThanStep {
                duration: self.duration,
                dt: self.controller.dt,
            });
        }
        Ok(())
    }

    /// Number of control intervals in `duration`.
    pub fn control_steps(&self) -> usize {
        ((self.duration / self.controller.dt) + 1e-9).floor().max(1.0) as usize
    }

    pub fn initial_q(&self) -> UnitQuaternion<f64> {
        match self.initial_attitude {
            InitialAttitude::Fixed(q) => q,
            InitialAttitude::Random => random_attitude(self.seed),
        }
    }
}

/// Uniform random rotation (Shoemake's subgroup algorithm).
pub fn random_attitude(seed: u64) -> UnitQuaternion<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let u3: f64 = rng.random();
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (s2, c2) = (2.0 * PI * u2).sin_cos();
    let (s3, c3) = (2.0 * PI * u3).sin_cos();
    UnitQuaternion::new_normalize(Quaternion::new(b * c3, a * s2, a * c2, b * s3))
}

/// State at the start of one control interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelemetryRow {
    pub t: f64,
    pub omega: Vec3,
    pub b_body: Vec3,
    pub moment: Vec3,
    /// `m × b_body` at the start of the interval.
    pub torque: Vec3,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Telemetry {
    pub rows: Vec<TelemetryRow>,
    /// State after the last interval.
    pub final_state: AttitudeState,
}

impl Telemetry {
    pub fn initial_omega(&self) -> Vec3 {
        self.rows.first().map_or(self.final_state.omega, |r| r.omega)
    }

    pub fn final_omega(&self) -> Vec3 {
        self.final_state.omega
    }

    pub fn elapsed(&self) -> f64 {
        self.rows.first().map_or(0.0, |r| self.final_state.t - r.t)
    }

    /// `(‖ω_final‖ − ‖ω_initial‖) / elapsed`; negative means net detumbling.
    pub fn average_angular_acceleration(&self) -> f64 {
        average_angular_acceleration(self)
    }

    /// True when kinetic energy never rises between consecutive control
    /// instants (including the final state) by more than `tol · V`.
    pub fn energy_non_increasing(&self, body: &SpacecraftBody, tol: f64) -> bool {
        let mut energies: Vec<f64> = self.rows.iter().map(|r| r.energy).collect();
        energies.push(kinetic_energy(&self.final_state.omega, body));
        energies.windows(2).all(|w| w[1] <= w[0] * (1.0 + tol))
    }
}

pub fn average_angular_acceleration(telemetry: &Telemetry) -> f64 {
    let elapsed = telemetry.elapsed();
    if elapsed <= 0.0 {
        return 0.0;
    }
    (telemetry.final_omega().norm() - telemetry.initial_omega().norm()) / elapsed
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    Config(#[from] ConfigError),
    #[error("simulation aborted at control step {step} (t = {t}): {reason}")]
    Abort {
        step: usize,
        t: f64,
        reason: String,
        partial: Box<Telemetry>,
    },
}

/// Run the closed loop for `config.duration` seconds.
pub fn run_detumble(config: &SimConfig) -> Result<Telemetry, SimError> {
    config.validate()?;
    let ctrl = &config.controller;
    let steps = config.control_steps();
    let h = ctrl.dt / config.substeps as f64;

    let mut state = AttitudeState::new(config.initial_q(), config.initial_omega, 0.0);
    let mut rows = Vec::with_capacity(steps);
    let mut b_prev: Option<Vec3> = None;

    let abort = |step: usize, t: f64, reason: String, rows: Vec<TelemetryRow>, last: AttitudeState| {
        SimError::Abort {
            step,
            t,
            reason,
            partial: Box::new(Telemetry { rows, final_state: last }),
        }
    };

    for k in 0..steps {
        state.t = k as f64 * ctrl.dt;
        let b_body = rotate_to_body(&state.q, &config.field.field_inertial(state.t));
        let command = match ctrl.command(&state.omega, &b_body, b_prev.as_ref()) {
            Ok(c) => c,
            Err(e) => return Err(abort(k, state.t, e.to_string(), rows, state)),
        };
        let moment = command.moment;
        let torque = magnetic_torque(&moment, &b_body);
        rows.push(TelemetryRow {
            t: state.t,
            omega: state.omega,
            b_body,
            moment,
            torque,
            energy: kinetic_energy(&state.omega, &config.body),
        });

        let field = &config.field;
        let hold = config.torque_hold;
        let torque_fn = |s: &AttitudeState| match hold {
            TorqueHold::Frozen => torque,
            TorqueHold::Varying => magnetic_torque(&moment, &rotate_to_body(&s.q, &field.field_inertial(s.t))),
        };
        for _ in 0..config.substeps {
            state = match rk4_step(&state, torque_fn, &config.body, h) {
                Ok(s) => s,
                Err(e) => return Err(abort(k, state.t, e.to_string(), rows, state)),
            };
        }
        b_prev = Some(b_body);
    }
    state.t = steps as f64 * ctrl.dt;
    Ok(Telemetry { rows, final_state: state })
}

/// Change in `‖ω‖` across the first interval that carries a commanded moment.
///
/// For ω×b that is the first interval. B-dot needs one prior sample, so the
/// measurement spans the second interval.
pub fn one_interval_delta(config: &SimConfig) -> Result<f64, SimError> {
    use crate::control::Algorithm;
    let intervals = match config.controller.algorithm {
        Algorithm::OmegaCrossB => 1,
        Algorithm::BDot => 2,
    };
    let mut cfg = config.clone();
    cfg.duration = intervals as f64 * cfg.controller.dt;
    let tel = run_detumble(&cfg)?;
    let start = tel.rows[intervals - 1].omega.norm();
    Ok(tel.final_omega().norm() - start)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    InitialOmegaMag,
    Dt,
    Kc,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::InitialOmegaMag => "initial_omega_mag",
            SweepAxis::Dt => "dt",
            SweepAxis::Kc => "k_c",
        }
    }

    /// Copy of `base` with this axis set to `value`.
    pub fn apply(self, base: &SimConfig, value: f64) -> Result<SimConfig, String> {
        if !(value.is_finite() && value > 0.0) {
            return Err(format!("{} must be positive, got {value}", self.name()));
        }
        let mut cfg = base.clone();
        match self {
            SweepAxis::InitialOmegaMag => {
                let n = base.initial_omega.norm();
                if n == 0.0 {
                    return Err("initial_omega_mag sweep needs a nonzero base initial_omega direction".into());
                }
                cfg.initial_omega = base.initial_omega * (value / n);
            }
            SweepAxis::Dt => cfg.controller.dt = value,
            SweepAxis::Kc => cfg.controller.k_c = value,
        }
        Ok(cfg)
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "initial_omega_mag" => Ok(SweepAxis::InitialOmegaMag),
            "dt" => Ok(SweepAxis::Dt),
            "k_c" => Ok(SweepAxis::Kc),
            other => Err(format!(
                "unknown sweep axis `{other}` (expected initial_omega_mag, dt or k_c)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    /// `‖ω‖` change over one actuated interval.
    OneInterval,
    /// Average angular acceleration over `duration`.
    FullRun,
}

impl Horizon {
    pub fn measure_name(self) -> &'static str {
        match self {
            Horizon::OneInterval => "delta_omega",
            Horizon::FullRun => "avg_angular_accel",
        }
    }
}

impl std::str::FromStr for Horizon {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "one_interval" => Ok(Horizon::OneInterval),
            "full_run" => Ok(Horizon::FullRun),
            other => Err(format!("unknown horizon `{other}` (expected one_interval or full_run)")),
        }
    }
}

fn measure(cfg: &SimConfig, horizon: Horizon) -> Result<f64, String> {
    let result = match horizon {
        Horizon::OneInterval => one_interval_delta(cfg),
        Horizon::FullRun => run_detumble(cfg).map(|t| t.average_angular_acceleration()),
    };
    result.map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub horizon: Horizon,
    pub rows: Vec<SweepRow>,
}

pub fn sweep_1d(base: &SimConfig, axis: SweepAxis, values: &[f64], horizon: Horizon) -> SweepTable {
    let rows = values
        .par_iter()
        .map(|&value| SweepRow {
            value,
            outcome: axis.apply(base, value).and_then(|cfg| measure(&cfg, horizon)),
        })
        .collect();
    SweepTable { axis, horizon, rows }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub value1: f64,
    pub value2: f64,
    pub outcome: Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridTable {
    pub axis1: SweepAxis,
    pub axis2: SweepAxis,
    pub horizon: Horizon,
    pub len1: usize,
    pub len2: usize,
    /// Row-major: `values1` outer, `values2` inner.
    pub rows: Vec<GridRow>,
}

impl GridTable {
    pub fn get(&self, i: usize, j: usize) -> &GridRow {
        &self.rows[i * self.len2 + j]
    }
}

pub fn sweep_2d(
    base: &SimConfig,
    axis1: SweepAxis,
    axis2: SweepAxis,
    values1: &[f64],
    values2: &[f64],
    horizon: Horizon,
) -> GridTable {
    let pairs: Vec<(f64, f64)> = values1
        .iter()
        .flat_map(|&a| values2.iter().map(move |&b| (a, b)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(value1, value2)| GridRow {
            value1,
            value2,
            outcome: axis1
                .apply(base, value1)
                .and_then(|cfg| axis2.apply(&cfg, value2))
                .and_then(|cfg| measure(&cfg, horizon)),
        })
        .collect();
    GridTable {
        axis1,
        axis2,
        horizon,
        len1: values1.len(),
        len2: values2.len(),
        rows,
    }
}
