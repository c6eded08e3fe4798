//! One-interval Δω over an (ω_i, Δt) grid, written as CSV to stdout.

use detumble::cli::grid_csv;
use detumble::config::linspace;
use detumble::sim::sweep_2d;
use detumble::{Algorithm, ControllerConfig, FieldModel, Horizon, SimConfig, SpacecraftBody, SweepAxis, Vec3};

fn main() {
    let base = SimConfig::new(
        SpacecraftBody::spherical(1.0).unwrap(),
        ControllerConfig::new(Algorithm::OmegaCrossB, 0.01, 1.0).unwrap(),
        FieldModel::StaticInertial { b0: Vec3::x() },
        Vec3::z(),
        1.0,
    );
    let grid = sweep_2d(
        &base,
        SweepAxis::InitialOmegaMag,
        SweepAxis::Dt,
        &linspace(1.0, 5.0, 30),
        &linspace(0.1, 3.0, 30),
        Horizon::OneInterval,
    );
    print!("{}", grid_csv(&grid));
}
