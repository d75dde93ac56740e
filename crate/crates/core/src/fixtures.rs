//! Reference group configurations used by tests, benchmarks and the
//! shipped example files: a cyclic loxodromic group, a symmetric
//! two-generator Schottky group on the disk, and a cusped second-kind
//! Fuchsian group (one parabolic, one hyperbolic generator) with its cusp
//! horoball end and funnel half-space end.

use num_complex::Complex64;

use crate::ends::{EndCollection, EndFlags, EndSpec, Region};
use crate::geometry::{BoundaryPoint, Isometry};
use crate::group::{GroupSpec, Presentation, Word};

/// Cyclic group generated by a translation of length `len` along the axis
/// through `-e_1`, `+e_1`.
pub fn cyclic_loxodromic(dim: usize, len: f64) -> GroupSpec {
    GroupSpec::new(
        "cyclic-loxodromic",
        dim,
        Presentation::Free,
        vec![("g".into(), Isometry::axis_loxodromic(dim, len))],
        None,
    )
    .expect("cyclic fixture is valid")
}

/// A symmetric two-generator Schottky group on the disk together with its
/// four pairing disks and the half-spaces over the four free boundary arcs.
pub struct SchottkyFixture {
    pub spec: GroupSpec,
    /// Euclidean (center, radius) of the four pairing disks, in the order
    /// +e1, +e2, -e1, -e2.
    pub disks: Vec<(Vec<f64>, f64)>,
    /// Half-spaces over the arcs between consecutive pairing disks; their
    /// boundary arcs lie in the domain of discontinuity.
    pub ordinary: Vec<Region>,
}

/// Builds the symmetric Schottky fixture: generator `a` translates by
/// `len` along the `e_1` axis, generator `b` is its rotation by pi/2. The
/// pairing disks are the geodesic disks orthogonal to the axes at distance
/// `len/2` from the origin; they are pairwise disjoint exactly when
/// `sqrt(2) m > 2 rho`.
pub fn schottky(len: f64) -> SchottkyFixture {
    let u = (len / 4.0).tanh();
    let m = (1.0 + u * u) / (2.0 * u);
    let rho = (1.0 - u * u) / (2.0 * u);
    assert!(
        std::f64::consts::SQRT_2 * m > 2.0 * rho,
        "pairing disks of the length-{len} Schottky configuration overlap"
    );

    let a = Isometry::axis_loxodromic(2, len);
    let r = Isometry::rotation_2d(std::f64::consts::FRAC_PI_2);
    let b = r.compose(&a).compose(&r.invert());
    let spec = GroupSpec::new(
        "schottky-symmetric",
        2,
        Presentation::Free,
        vec![("a".into(), a), ("b".into(), b)],
        None,
    )
    .expect("schottky fixture is valid");

    let disks = vec![
        (vec![m, 0.0], rho),
        (vec![0.0, m], rho),
        (vec![-m, 0.0], rho),
        (vec![0.0, -m], rho),
    ];

    // Disk at angle 0 occupies the arc [-theta, theta] with cos theta = 1/m;
    // the free arc to the next disk spans (theta, pi/2 - theta).
    let theta = (1.0 / m).acos();
    let mut ordinary = Vec::new();
    for q in 0..4 {
        let base = q as f64 * std::f64::consts::FRAC_PI_2;
        let a1 = base + theta;
        let a2 = base + std::f64::consts::FRAC_PI_2 - theta;
        let xi = BoundaryPoint::new(&[a1.cos(), a1.sin()]).unwrap();
        let eta = BoundaryPoint::new(&[a2.cos(), a2.sin()]).unwrap();
        ordinary.push(Region::halfspace_through(&xi, &eta).expect("gap arc is nondegenerate"));
    }

    SchottkyFixture { spec, disks, ordinary }
}

/// Parameters of the cusped Fuchsian fixture.
#[derive(Debug, Clone, Copy)]
pub struct CuspedParams {
    /// Translation width of the parabolic before conjugation.
    pub cusp_shift: f64,
    /// Translation length of the hyperbolic generator.
    pub hyp_len: f64,
    /// Horizontal offset worked into the conjugation so that no declared
    /// object lands on a coordinate axis by accident.
    pub conj_offset: f64,
    /// Height of the invariant horoball before conjugation; the ball-model
    /// horoball diameter comes out as `2/(height + 1)`.
    pub horoball_height: f64,
}

impl Default for CuspedParams {
    fn default() -> Self {
        Self { cusp_shift: 3.0, hyp_len: 4.0, conj_offset: 0.4, horoball_height: 3.0 }
    }
}

/// The cusped second-kind Fuchsian fixture: generators `a` (parabolic) and
/// `b` (hyperbolic), the cusp point, and the declared ends.
pub struct CuspedFixture {
    pub spec: GroupSpec,
    pub ends: EndCollection,
    /// The parabolic fixed point on the sphere.
    pub cusp: BoundaryPoint,
    pub params: CuspedParams,
}

/// Builds the cusped fixture. Before conjugation the group is
/// `< z + shift, cosh/sinh matrix fixing +-1 >`, a free ping-pong pair
/// whose quotient has one cusp and two funnels; the conjugation `k T` with
/// `k(z) = (z-1)/(z+1)`, `T(z) = z + offset` moves the cusp from infinity
/// to the boundary point `sigma(1) = +e_1`. The declared collection is the
/// cusp horoball together with the funnel over the axis of `b`.
pub fn cusped_fuchsian(params: CuspedParams) -> CuspedFixture {
    let p0 = Isometry::horizontal_translation(2, Complex64::new(params.cusp_shift, 0.0))
        .expect("translation is unimodular");
    let h0 = Isometry::axis_loxodromic(2, params.hyp_len);
    let k = Isometry::from_real(2, [1.0, -1.0, 1.0, 1.0]).expect("k is invertible");
    let t = Isometry::from_real(2, [1.0, params.conj_offset, 0.0, 1.0]).unwrap();
    let conj = k.compose(&t);
    let conj_inv = conj.invert();
    let p = conj.compose(&p0).compose(&conj_inv);
    let h = conj.compose(&h0).compose(&conj_inv);

    let spec = GroupSpec::new(
        "cusped-fuchsian",
        2,
        Presentation::Free,
        vec![("a".into(), p.clone()), ("b".into(), h.clone())],
        None,
    )
    .expect("cusped fixture is valid");

    // Cusp: image of infinity under the conjugation, then to the ball.
    let map = spec.model_map();
    let cusp_h = conj.apply_h_boundary(&None);
    let cusp = map.to_ball_boundary(&cusp_h);

    let horoball = Region::horoball(cusp, 2.0 / (params.horoball_height + 1.0))
        .expect("horoball diameter in range");

    // Funnel: half-space over the axis of the conjugated hyperbolic.
    let e1 = conj.apply_h_boundary(&Some(Complex64::new(1.0, 0.0)));
    let e2 = conj.apply_h_boundary(&Some(Complex64::new(-1.0, 0.0)));
    let xi = map.to_ball_boundary(&e1);
    let eta = map.to_ball_boundary(&e2);
    let funnel = Region::halfspace_through(&xi, &eta).expect("funnel arc is nondegenerate");
    // The funnel side must be the one carrying the domain-of-discontinuity
    // arc: witness is the image of the half-plane boundary origin.
    let w = conj.apply_h_boundary(&Some(Complex64::new(0.0, 0.0)));
    let witness = map.to_ball_boundary(&w);
    assert!(
        funnel.contains_closure(witness.coords(), 1e-9),
        "funnel side does not face its boundary arc"
    );

    let ends = EndCollection::new(
        vec![
            EndSpec {
                name: "cusp".into(),
                region: horoball,
                stabilizer: vec![Word::letter(0, false)],
                flags: EndFlags { bounded: true, expected_type: Some("infinite".into()) },
            },
            EndSpec {
                name: "funnel".into(),
                region: funnel,
                stabilizer: vec![Word::letter(1, false)],
                flags: EndFlags { bounded: false, expected_type: Some("finite".into()) },
            },
        ],
        true,
        vec![],
    )
    .expect("fixture ends are disjoint");

    CuspedFixture { spec, ends, cusp, params }
}
