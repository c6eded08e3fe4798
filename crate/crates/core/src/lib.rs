//! Discrete-time magnetic detumbling: rigid-body dynamics, the ω×b and
//! B-dot control laws, sampled-data instability criteria, and a sweep
//! harness that produces tabular experiment data.
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example <name>`.

pub mod cli;
pub mod config;
pub mod control;
pub mod dynamics;
pub mod geomag;
pub mod sim;
pub mod stability;

pub use control::{Algorithm, ControlCommand, ControllerConfig};
pub use dynamics::{AttitudeState, SpacecraftBody, Vec3};
pub use geomag::{FieldModel, OrbitConfig};
pub use sim::{run_detumble, Horizon, SimConfig, SweepAxis, Telemetry, TorqueHold};
pub use stability::{entry_check, StabilityReport};
