//! Field along a polar orbit and the rotation rate the B-dot law sees.

use detumble::geomag::orbital_period;
use detumble::{FieldModel, OrbitConfig};

fn main() {
    let field = FieldModel::leo_dipole(500e3, std::f64::consts::FRAC_PI_2);
    let FieldModel::TiltedDipole { orbit_radius, .. } = field else { unreachable!() };
    let t_orb = orbital_period(orbit_radius);
    println!("period {t_orb:.1} s");
    for i in 0..8 {
        let t = t_orb * i as f64 / 8.0;
        let b = field.field_inertial(t);
        println!("t = {t:7.1}  b = [{:+.3e}, {:+.3e}, {:+.3e}]  |b| = {:.3e} T", b.x, b.y, b.z, b.norm());
    }
    let orbit = OrbitConfig::new(t_orb, std::f64::consts::FRAC_PI_2).unwrap();
    println!("mean field rotation rate {:.4e} rad/s (orbit rate {:.4e})", field.effective_rotation_rate(&orbit), 2.0 * std::f64::consts::PI / t_orb);
}
