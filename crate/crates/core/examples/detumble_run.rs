//! Detumble a small spacecraft in a dipole field with both control laws.

use detumble::control::avanzini_gain;
use detumble::sim::InitialAttitude;
use detumble::{run_detumble, Algorithm, ControllerConfig, FieldModel, OrbitConfig, SimConfig, SpacecraftBody, Vec3};

fn main() {
    let body = SpacecraftBody::diagonal(0.01, 0.035, 0.035).unwrap();
    let orbit = OrbitConfig::new(5400.0, std::f64::consts::FRAC_PI_2).unwrap();
    let k_c = avanzini_gain(&orbit, body.j_min());
    let field = FieldModel::leo_dipole(500e3, 1.7);
    let omega = Vec3::new(5.0, -4.0, 7.0).map(f64::to_radians);

    println!("k_c = {k_c:.4e}");
    for alg in [Algorithm::OmegaCrossB, Algorithm::BDot] {
        let mut cfg = SimConfig::new(body.clone(), ControllerConfig::new(alg, k_c, 1.0).unwrap(), field, omega, 3.0 * 5400.0);
        cfg.initial_attitude = InitialAttitude::Random;
        cfg.seed = 7;
        let tel = run_detumble(&cfg).unwrap();
        println!(
            "{:>14}: |w| {:.3} -> {:.3} deg/s, energy monotone: {}",
            alg.name(),
            tel.initial_omega().norm().to_degrees(),
            tel.final_omega().norm().to_degrees(),
            tel.energy_non_increasing(&body, 1e-12)
        );
    }
}
