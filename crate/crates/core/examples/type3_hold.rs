//! Holding the moment over a long interval: the one-step rate change follows
//! -k_c sin(ω_i Δt) and reverses sign past ω_i Δt = π.

use detumble::sim::one_interval_delta;
use detumble::stability::type3_delta_omega;
use detumble::{Algorithm, ControllerConfig, FieldModel, SimConfig, SpacecraftBody, Vec3};

fn main() {
    let k = 0.01;
    let body = SpacecraftBody::spherical(1.0).unwrap();
    println!("{:>8} {:>12} {:>12}", "w*dt", "simulated", "predicted");
    for i in 1..=16 {
        let dt = i as f64 * 0.4;
        let cfg = SimConfig::new(
            body.clone(),
            ControllerConfig::new(Algorithm::OmegaCrossB, k, dt).unwrap(),
            FieldModel::StaticInertial { b0: Vec3::x() },
            Vec3::z(),
            dt,
        );
        let d = one_interval_delta(&cfg).unwrap();
        println!("{dt:8.2} {d:+12.5e} {:+12.5e}", type3_delta_omega(1.0, dt, k));
    }
}
