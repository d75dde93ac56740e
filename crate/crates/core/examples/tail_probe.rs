use kleinlab_core::fixtures::schottky;
use kleinlab_core::geometry::BallPoint;
use kleinlab_core::group::{orbit, OrbitParams};
use kleinlab_core::measure::orbit_measure;
use kleinlab_core::shadow::Shadow;

fn main() {
    let fx = schottky(4.0);
    let table = orbit(&fx.spec, &BallPoint::origin(2), 10, &OrbitParams::default()).unwrap();
    let m = orbit_measure(&table, 0.51, true).unwrap();
    let target = table.entries.iter().find(|e| e.word.to_string() == "aaaaaaaaaa").unwrap();
    let s = Shadow::from_polar(target.image.direction(), target.dist, 1.0);
    println!("phi = {:e}, center_dist = {}", s.angular_radius, s.center_dist);
    // first offending atom
    for a in m.atoms() {
        if s.contains_location(&a.location) {
            let d = a.location.dist_origin().unwrap();
            if (d - 40.0).abs() > 1.0 {
                let dir = a.location.direction().unwrap();
                let psi = dir.angle_to(&target.image.direction().unwrap());
                let t_star = (s.center_dist.tanh() * psi.cos()).atanh();
                println!("offender d={d} psi={psi:e} t_star={t_star} tanh(cd)={}", s.center_dist.tanh());
                println!("  dist_polar = {}", kleinlab_core::geometry::dist_polar(d, s.center_dist, psi));
                println!("  line dist = {}", (s.center_dist.sinh() * psi.sin()).asinh());
                break;
            }
        }
    }
}
