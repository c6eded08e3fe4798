//! B-dot aliasing: rates settle on even multiples of π/Δt instead of zero.

use std::f64::consts::PI;

use detumble::stability::{bdot_phase_acceleration, classify_equilibria};
use detumble::{run_detumble, Algorithm, ControllerConfig, FieldModel, SimConfig, SpacecraftBody, TorqueHold, Vec3};

fn main() {
    let dt = 1.0;
    let k = 0.5;
    let b = Vec3::x();
    let eq = classify_equilibria(dt, 4.0 * PI);
    println!("stable:   {:?}", eq.stable_points);
    println!("unstable: {:?}", eq.unstable_points);

    for w in (0..=16).map(|i| i as f64 * PI / 4.0) {
        println!("w = {w:6.3}  w_dot = {:+.4}", bdot_phase_acceleration(w, dt, k, 1.0, &b));
    }

    let body = SpacecraftBody::spherical(1.0).unwrap();
    for w0 in [0.5, 2.0, 4.0, 5.5, 8.0, 11.0] {
        let cfg = SimConfig::new(
            body.clone(),
            ControllerConfig::new(Algorithm::BDot, k, dt).unwrap(),
            FieldModel::StaticInertial { b0: b },
            Vec3::new(0.0, 0.0, w0),
            100.0,
        )
        .with_torque_hold(TorqueHold::Frozen);
        let w = run_detumble(&cfg).unwrap().final_omega().norm();
        println!("w0 = {w0:5.2} -> {w:.4} (predicted {:.4})", eq.attractor_of(w0, dt));
    }
}
