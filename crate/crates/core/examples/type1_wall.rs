//! Overshoot instability: the perpendicular rate flips sign once k_c·Δt/I > 1
//! and grows once it passes 2.

use detumble::stability::type1_criterion;
use detumble::{run_detumble, Algorithm, ControllerConfig, FieldModel, SimConfig, SpacecraftBody, TorqueHold, Vec3};

fn main() {
    let body = SpacecraftBody::spherical(1.0).unwrap();
    let field = FieldModel::StaticInertial { b0: Vec3::x() };
    for k in [0.5, 1.0, 1.5, 1.9, 2.0, 2.1, 2.5] {
        let cfg = SimConfig::new(
            body.clone(),
            ControllerConfig::new(Algorithm::OmegaCrossB, k, 1.0).unwrap(),
            field,
            Vec3::z(),
            20.0,
        )
        .with_torque_hold(TorqueHold::Frozen);
        let tel = run_detumble(&cfg).unwrap();
        let crit = type1_criterion(k, 1.0, &body);
        println!(
            "k_c = {k:.1}: w_z after 20 steps = {:+.3e}  unstable: {}",
            tel.final_omega().z,
            crit.unstable
        );
    }
}
