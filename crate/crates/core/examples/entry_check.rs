//! Pre-flight gate: is B-dot safe to start at this tumble rate and step?

use detumble::control::avanzini_gain;
use detumble::{entry_check, Algorithm, ControllerConfig, OrbitConfig, SpacecraftBody, Vec3};

fn main() {
    let body = SpacecraftBody::diagonal(0.01, 0.02, 0.02).unwrap();
    let k = avanzini_gain(&OrbitConfig::new(5400.0, std::f64::consts::FRAC_PI_2).unwrap(), body.j_min());
    for (deg_s, dt) in [(10.0, 1.0), (100.0, 1.0), (200.0, 1.0), (200.0, 0.5)] {
        let ctl = ControllerConfig::new(Algorithm::BDot, k, dt).unwrap();
        let r = entry_check(&Vec3::new(0.0, 0.0, f64::to_radians(deg_s)), &ctl, &body);
        let verdict = if r.recommended_entry { "enter".to_string() } else { format!("refuse {:?}", r.violations()) };
        println!("{deg_s:5.0} deg/s, dt = {dt}: max dt {:.3} s -> {verdict}", r.type2_max_dt);
    }
}
