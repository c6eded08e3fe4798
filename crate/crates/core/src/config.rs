//! Run-configuration file parsing.
//!
//! The file is TOML restricted to a fixed schema of dotted keys; any key not
//! listed below is rejected. Physical parameters are SI.
//!
//! ```toml
//! body.inertia = [0.02, 0.09, 0.09]        # diagonal, full 3x3 rows, or a scalar
//!
//! controller.algorithm = "bdot"            # or "omega_cross_b"
//! controller.k_c = 0.5                     # or "avanzini" (needs orbit.*)
//! controller.dt = 1.0
//! controller.moment_cap = 0.2              # optional
//!
//! field.model = "static"                   # "static" | "planar_rotating" | "tilted_dipole"
//! field.b0 = [3e-5, 0.0, 0.0]              # static, planar_rotating
//! field.axis = [0.0, 0.0, 1.0]             # planar_rotating
//! field.rate = 1e-3                        # planar_rotating, rad/s
//! field.orbit_radius = 6.9e6               # tilted_dipole, m
//! field.inclination = 1.7                  # tilted_dipole, rad
//! field.orbit_phase0 = 0.0                 # tilted_dipole, optional
//! field.dipole_tilt = 0.0                  # tilted_dipole, optional
//! field.dipole_strength = 7.9e15           # tilted_dipole, optional
//!
//! orbit.t_orb = 5400.0                     # optional; needed for k_c = "avanzini"
//! orbit.xi = 1.5707963267948966
//!
//! sim.initial_omega = [0.0, 0.0, 4.0]      # rad/s (or sim.initial_omega_deg in deg/s)
//! sim.initial_q = [1.0, 0.0, 0.0, 0.0]     # w, x, y, z; or "random" (uses sim.seed)
//! sim.duration = 100.0
//! sim.substeps = 20
//! sim.torque = "varying"                   # or "frozen"
//! sim.seed = 0
//!
//! sweep.axis = "initial_omega_mag"         # | "dt" | "k_c"
//! sweep.values = [0.5, 1.0, 1.5]           # or sweep.start / sweep.stop / sweep.count
//! sweep.horizon = "one_interval"           # | "full_run"
//! sweep.axis2 = "dt"                       # optional second axis for a grid
//! sweep.values2 = [0.5, 1.0]               # or sweep.start2 / sweep.stop2 / sweep.count2
//!
//! portrait.omega_max = 12.566370614359172
//! portrait.points = 2001
//! ```

use std::path::Path;

use nalgebra::{Matrix3, Quaternion, UnitQuaternion};
use serde::Deserialize;
use thiserror::Error;

use crate::control::{avanzini_gain, Algorithm, ControllerConfig};
use crate::dynamics::{SpacecraftBody, Vec3};
use crate::geomag::{FieldModel, OrbitConfig, DEFAULT_DIPOLE_STRENGTH};
use crate::sim::{
    Horizon, InitialAttitude, SimConfig, SweepAxis, TorqueHold, DEFAULT_SUBSTEPS,
};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> SpecError {
    SpecError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    body: RawBody,
    controller: RawController,
    field: RawField,
    orbit: Option<RawOrbit>,
    sim: RawSim,
    sweep: Option<RawSweep>,
    portrait: Option<RawPortrait>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBody {
    inertia: RawInertia,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawInertia {
    Scalar(f64),
    Diagonal([f64; 3]),
    Full([[f64; 3]; 3]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawController {
    algorithm: String,
    k_c: RawGain,
    dt: f64,
    moment_cap: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawGain {
    Value(f64),
    Named(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    model: String,
    b0: Option<[f64; 3]>,
    axis: Option<[f64; 3]>,
    rate: Option<f64>,
    orbit_radius: Option<f64>,
    inclination: Option<f64>,
    orbit_phase0: Option<f64>,
    dipole_tilt: Option<f64>,
    dipole_strength: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOrbit {
    t_orb: f64,
    xi: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    initial_omega: Option<[f64; 3]>,
    initial_omega_deg: Option<[f64; 3]>,
    initial_q: Option<RawAttitude>,
    duration: f64,
    substeps: Option<i64>,
    torque: Option<String>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawAttitude {
    Quaternion([f64; 4]),
    Named(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: String,
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
    horizon: Option<String>,
    axis2: Option<String>,
    values2: Option<Vec<f64>>,
    start2: Option<f64>,
    stop2: Option<f64>,
    count2: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPortrait {
    omega_max: f64,
    points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub horizon: Horizon,
    pub second: Option<(SweepAxis, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortraitSpec {
    pub omega_max: f64,
    pub points: usize,
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub sim: SimConfig,
    pub orbit: Option<OrbitConfig>,
    pub sweep: Option<SweepSpec>,
    pub portrait: Option<PortraitSpec>,
}

impl RunSpec {
    pub fn from_path(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let raw: RawSpec = toml::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))?;
        raw.validate()
    }
}

fn positive(key: &str, v: f64) -> Result<f64, SpecError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be positive and finite, got {v}")))
    }
}

fn finite_vec(key: &str, v: [f64; 3]) -> Result<Vec3, SpecError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(Vec3::from(v))
    } else {
        Err(invalid(key, "components must be finite"))
    }
}

fn require<T>(key: &str, v: Option<T>, model: &str) -> Result<T, SpecError> {
    v.ok_or_else(|| invalid(key, format!("required for field.model = \"{model}\"")))
}

fn reject<T>(key: &str, v: &Option<T>, model: &str) -> Result<(), SpecError> {
    match v {
        Some(_) => Err(invalid(key, format!("not used by field.model = \"{model}\""))),
        None => Ok(()),
    }
}

fn axis_values(
    key: &str,
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
) -> Result<Vec<f64>, SpecError> {
    match (values, start, stop, count) {
        (Some(v), None, None, None) if !v.is_empty() => Ok(v),
        (Some(_), None, None, None) => Err(invalid(key, "must not be empty")),
        (None, Some(a), Some(b), Some(n)) if n >= 1 => Ok(linspace(a, b, n)),
        _ => Err(invalid(
            key,
            "give either a value list or all of start/stop/count (count >= 1)",
        )),
    }
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

impl RawSpec {
    fn validate(self) -> Result<RunSpec, SpecError> {
        let inertia = match self.body.inertia {
            RawInertia::Scalar(s) => Matrix3::from_diagonal_element(s),
            RawInertia::Diagonal(d) => Matrix3::from_diagonal(&Vec3::from(d)),
            RawInertia::Full(rows) => Matrix3::from_fn(|i, j| rows[i][j]),
        };
        let body = SpacecraftBody::new(inertia).map_err(|e| invalid("body.inertia", e.to_string()))?;

        let orbit = self
            .orbit
            .map(|o| OrbitConfig::new(o.t_orb, o.xi))
            .transpose()
            .map_err(|e| invalid("orbit", e.to_string()))?;

        let c = self.controller;
        let algorithm: Algorithm = c
            .algorithm
            .parse()
            .map_err(|e: String| invalid("controller.algorithm", e))?;
        let dt = positive("controller.dt", c.dt)?;
        let k_c = match c.k_c {
            RawGain::Value(k) if k.is_finite() && k >= 0.0 => k,
            RawGain::Value(k) => {
                return Err(invalid("controller.k_c", format!("must be non-negative, got {k}")))
            }
            RawGain::Named(name) if name == "avanzini" => {
                let orbit = orbit.ok_or_else(|| {
                    invalid("controller.k_c", "\"avanzini\" needs orbit.t_orb and orbit.xi")
                })?;
                avanzini_gain(&orbit, body.j_min())
            }
            RawGain::Named(name) => {
                return Err(invalid(
                    "controller.k_c",
                    format!("expected a number or \"avanzini\", got \"{name}\""),
                ))
            }
        };
        let mut controller = ControllerConfig {
            algorithm,
            k_c,
            dt,
            moment_cap: None,
        };
        if let Some(cap) = c.moment_cap {
            controller.moment_cap = Some(positive("controller.moment_cap", cap)?);
        }

        let field = parse_field(self.field)?;

        let s = self.sim;
        let initial_omega = match (s.initial_omega, s.initial_omega_deg) {
            (Some(w), None) => finite_vec("sim.initial_omega", w)?,
            (None, Some(w)) => finite_vec("sim.initial_omega_deg", w)?.map(f64::to_radians),
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "sim.initial_omega",
                    "give only one of sim.initial_omega and sim.initial_omega_deg",
                ))
            }
            (None, None) => return Err(invalid("sim.initial_omega", "missing")),
        };
        let initial_attitude = match s.initial_q {
            None => InitialAttitude::default(),
            Some(RawAttitude::Named(n)) if n == "random" => InitialAttitude::Random,
            Some(RawAttitude::Named(n)) => {
                return Err(invalid("sim.initial_q", format!("expected [w, x, y, z] or \"random\", got \"{n}\"")))
            }
            Some(RawAttitude::Quaternion([w, x, y, z])) => {
                let q = Quaternion::new(w, x, y, z);
                if !(q.norm().is_finite() && q.norm() > 0.0) {
                    return Err(invalid("sim.initial_q", "quaternion must be finite and nonzero"));
                }
                InitialAttitude::Fixed(UnitQuaternion::new_normalize(q))
            }
        };
        let duration = positive("sim.duration", s.duration)?;
        if duration < dt * (1.0 - 1e-12) {
            return Err(invalid(
                "sim.duration",
                format!("sim.duration ({duration}) must be >= controller.dt ({dt})"),
            ));
        }
        let substeps = match s.substeps {
            None => DEFAULT_SUBSTEPS,
            Some(n) if n >= 1 => n as usize,
            Some(n) => return Err(invalid("sim.substeps", format!("must be >= 1, got {n}"))),
        };
        let torque_hold = match s.torque.as_deref() {
            None | Some("varying") => TorqueHold::Varying,
            Some("frozen") => TorqueHold::Frozen,
            Some(other) => {
                return Err(invalid(
                    "sim.torque",
                    format!("expected \"varying\" or \"frozen\", got \"{other}\""),
                ))
            }
        };

        let sim = SimConfig {
            body,
            controller,
            field,
            initial_omega,
            initial_attitude,
            duration,
            substeps,
            torque_hold,
            seed: s.seed.unwrap_or(0),
        };

        let sweep = self.sweep.map(parse_sweep).transpose()?;
        let portrait = self
            .portrait
            .map(|p| -> Result<PortraitSpec, SpecError> {
                let points = p.points.unwrap_or(2001);
                if points < 2 {
                    return Err(invalid("portrait.points", "must be >= 2"));
                }
                Ok(PortraitSpec {
                    omega_max: positive("portrait.omega_max", p.omega_max)?,
                    points,
                })
            })
            .transpose()?;

        Ok(RunSpec {
            sim,
            orbit,
            sweep,
            portrait,
        })
    }
}

fn parse_field(f: RawField) -> Result<FieldModel, SpecError> {
    let model = f.model.as_str();
    let dipole_keys = |f: &RawField| -> Result<(), SpecError> {
        reject("field.orbit_radius", &f.orbit_radius, model)?;
        reject("field.inclination", &f.inclination, model)?;
        reject("field.orbit_phase0", &f.orbit_phase0, model)?;
        reject("field.dipole_tilt", &f.dipole_tilt, model)?;
        reject("field.dipole_strength", &f.dipole_strength, model)
    };
    let nonzero = |key: &str, v: Vec3| {
        if v.norm() > 0.0 {
            Ok(v)
        } else {
            Err(invalid(key, "must be a nonzero vector"))
        }
    };
    match model {
        "static" => {
            dipole_keys(&f)?;
            reject("field.axis", &f.axis, model)?;
            reject("field.rate", &f.rate, model)?;
            let b0 = finite_vec("field.b0", require("field.b0", f.b0, model)?)?;
            Ok(FieldModel::StaticInertial {
                b0: nonzero("field.b0", b0)?,
            })
        }
        "planar_rotating" => {
            dipole_keys(&f)?;
            let b0 = finite_vec("field.b0", require("field.b0", f.b0, model)?)?;
            let axis = finite_vec("field.axis", require("field.axis", f.axis, model)?)?;
            let rate = require("field.rate", f.rate, model)?;
            if !rate.is_finite() {
                return Err(invalid("field.rate", "must be finite"));
            }
            Ok(FieldModel::PlanarRotating {
                b0: nonzero("field.b0", b0)?,
                axis: nonzero("field.axis", axis)?,
                rate,
            })
        }
        "tilted_dipole" => {
            reject("field.b0", &f.b0, model)?;
            reject("field.axis", &f.axis, model)?;
            reject("field.rate", &f.rate, model)?;
            let radius = positive(
                "field.orbit_radius",
                require("field.orbit_radius", f.orbit_radius, model)?,
            )?;
            let inclination = require("field.inclination", f.inclination, model)?;
            Ok(FieldModel::TiltedDipole {
                orbit_radius: radius,
                inclination,
                orbit_phase0: f.orbit_phase0.unwrap_or(0.0),
                dipole_tilt: f.dipole_tilt.unwrap_or(0.0),
                dipole_strength: positive(
                    "field.dipole_strength",
                    f.dipole_strength.unwrap_or(DEFAULT_DIPOLE_STRENGTH),
                )?,
            })
        }
        other => Err(invalid(
            "field.model",
            format!("expected \"static\", \"planar_rotating\" or \"tilted_dipole\", got \"{other}\""),
        )),
    }
}

fn parse_sweep(s: RawSweep) -> Result<SweepSpec, SpecError> {
    let axis: SweepAxis = s.axis.parse().map_err(|e: String| invalid("sweep.axis", e))?;
    let values = axis_values("sweep.values", s.values, s.start, s.stop, s.count)?;
    let horizon = match s.horizon.as_deref() {
        None => Horizon::FullRun,
        Some(h) => h.parse().map_err(|e: String| invalid("sweep.horizon", e))?,
    };
    let second = match s.axis2 {
        Some(a2) => {
            let axis2: SweepAxis = a2.parse().map_err(|e: String| invalid("sweep.axis2", e))?;
            if axis2 == axis {
                return Err(invalid("sweep.axis2", "must differ from sweep.axis"));
            }
            let v2 = axis_values("sweep.values2", s.values2, s.start2, s.stop2, s.count2)?;
            Some((axis2, v2))
        }
        None => {
            if s.values2.is_some() || s.start2.is_some() || s.stop2.is_some() || s.count2.is_some() {
                return Err(invalid("sweep.values2", "given without sweep.axis2"));
            }
            None
        }
    };
    Ok(SweepSpec {
        axis,
        values,
        horizon,
        second,
    })
}
