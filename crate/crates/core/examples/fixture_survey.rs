//! Prints orbit and exponent diagnostics for the shipped fixtures.
//!
//! ```bash
//! cargo run --release -p kleinlab-core --example fixture_survey
//! ```

use kleinlab_core::fixtures::{cusped_fuchsian, cyclic_loxodromic, schottky, CuspedParams};
use kleinlab_core::geometry::BallPoint;
use kleinlab_core::group::{orbit, OrbitParams};
use kleinlab_core::poincare::{critical_exponent, poincare_partial};

fn survey(name: &str, spec: &kleinlab_core::GroupSpec, depth: usize) {
    let t0 = std::time::Instant::now();
    let table = orbit(spec, &BallPoint::origin(spec.dim), depth, &OrbitParams::default()).unwrap();
    let max_d = table.entries.iter().map(|e| e.dist).fold(0.0f64, f64::max);
    let min_d = table
        .entries
        .iter()
        .filter(|e| e.dist > 0.0)
        .map(|e| e.dist)
        .fold(f64::INFINITY, f64::min);
    println!(
        "{name}: depth {depth} entries {} dist [{min_d:.3}, {max_d:.3}] ({:?})",
        table.entries.len(),
        t0.elapsed()
    );
    match critical_exponent(&table, None) {
        Ok(est) => println!(
        "  delta_hat {:.4} delta_bisect {:.4} gap {:.4} residual {:.4} stable {}",
            est.delta_hat, est.delta_bisect, est.gap, est.fit_residual, est.stable
        ),
        Err(e) => println!("  exponent: {e}"),
    }
    for s in [0.5, 0.7, 0.9, 1.1] {
        let est = poincare_partial(&table, &BallPoint::origin(spec.dim), s);
        println!(
            "  s={s}: P_N {:.6e} ratio {:?} verdict {:?}",
            est.partial_sum, est.tail_ratio, est.verdict
        );
    }
}

fn main() {
    let cyc = cyclic_loxodromic(2, 2.0);
    survey("cyclic", &cyc, 40);

    let fx = schottky(4.0);
    for depth in [8, 10, 12] {
        survey("schottky(4)", &fx.spec, depth);
    }

    let cf = cusped_fuchsian(CuspedParams::default());
    for depth in [10, 12] {
        survey("cusped", &cf.spec, depth);
    }
}
