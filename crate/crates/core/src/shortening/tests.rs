use proptest::prelude::*;

use super::*;
use crate::config::RadiusConfig;
use crate::fixtures::{half_planes, plane, quad, sectors};
use crate::geom;
use crate::norms::Norm;
use crate::paths::is_geodesic_sequence;

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn pts(c: &Complex, xs: &[[f64; 2]]) -> Vec<Point> {
    xs.iter()
        .map(|&x| {
            let f = (0..c.faces().len()).find(|&f| c.face(f).contains(x, 0.0)).unwrap();
            Point::new(f, x)
        })
        .collect()
}

fn skewed() -> Complex {
    half_planes(quad(0.5), quad(-0.5))
}

#[test]
fn zigzag_energy_decreases_to_a_straight_line() {
    let c = plane(Norm::euclidean(2));
    let p = pts(&c, &[[0.0, 0.0], [1.0, 1.0], [2.0, -1.0], [3.0, 1.0], [4.0, 0.0]]);
    let mut s = AdmissibleSequence::new(&c, p, f64::INFINITY, &cfg()).unwrap();
    for _ in 0..20 {
        let t = shorten_step(&c, &s, &cfg()).unwrap();
        assert!(t.energy() < s.energy());
        assert!(t.length() <= s.length() + 1e-12);
        assert!(t.max_edge() <= s.max_edge() + 1e-12);
        s = t;
    }
    let lim = shorten_to_geodesic(&c, &s, &cfg(), &ShortenConfig::default()).unwrap();
    assert!((lim.sequence.length() - 4.0).abs() < 1e-8);
    for (k, p) in lim.sequence.points().iter().enumerate() {
        assert!(geom::dist(p.coords, [k as f64, 0.0]) < 1e-8, "{p:?}");
    }
}

#[test]
fn uneven_subdivision_becomes_even() {
    let c = plane(Norm::euclidean(2));
    let p = pts(&c, &[[0.0, 0.0], [0.1, 0.2], [0.5, 1.0], [2.0, 4.0]]);
    let s = AdmissibleSequence::new(&c, p, f64::INFINITY, &cfg()).unwrap();
    let lim = shorten_to_geodesic(&c, &s, &cfg(), &ShortenConfig::default()).unwrap();
    let ls = lim.sequence.edge_lengths();
    assert!(crate::paths::equal_edges(&ls, 1e-8), "{ls:?}");
    for p in lim.sequence.points() {
        assert!((p.coords[1] - 2.0 * p.coords[0]).abs() < 1e-9);
    }
}

#[test]
fn equal_edge_geodesics_are_fixed() {
    let c = skewed();
    let (a, b) = (Point::new(0, [-0.6, 0.9]), Point::new(1, [0.8, -0.7]));
    let (_, path) = crate::paths::local_distance(&c, &a, &b, &cfg()).unwrap();
    let s = AdmissibleSequence::subdivide(&c, &path, 6, f64::INFINITY, &cfg()).unwrap();
    let t = shorten_step(&c, &s, &cfg()).unwrap();
    assert!(max_displacement(&c, &s, &t, &cfg()) < 1e-9);
    assert!(is_geodesic_sequence(&c, s.points(), &cfg(), 1e-9).unwrap());
}

#[test]
fn refracted_limit_matches_one_dimensional_minimum() {
    let c = skewed();
    let p = pts(&c, &[[0.0, 1.0], [0.4, 0.5], [-0.3, 0.1], [0.2, -0.4], [-0.1, -1.0]]);
    let s = AdmissibleSequence::new(&c, p, f64::INFINITY, &cfg()).unwrap();
    let lim = shorten_to_geodesic(&c, &s, &cfg(), &ShortenConfig::default()).unwrap();
    let f = |x: f64| quad(0.5).value(&[x, -1.0]) + quad(-0.5).value(&[-0.1 - x, -1.0]);
    let (mut lo, mut hi) = (-3.0, 3.0);
    for _ in 0..200 {
        let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if f(m1) < f(m2) { hi = m2 } else { lo = m1 }
    }
    assert!((lim.sequence.length() - f(0.5 * (lo + hi))).abs() < 1e-8);
    assert!(is_geodesic_sequence(&c, lim.sequence.points(), &cfg(), 1e-8).unwrap());
    assert!(crate::paths::equal_edges(&lim.sequence.edge_lengths(), 1e-8));
    let rise = lim.log.windows(2).map(|w| w[1].energy - w[0].energy).fold(f64::NEG_INFINITY, f64::max);
    // Vertices within the containment tolerance of the axis see both norms.
    assert!(rise <= 1e-10, "{rise}");
}

#[test]
fn admissibility_is_enforced() {
    let c = plane(Norm::euclidean(2));
    let p = pts(&c, &[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]);
    let r = AdmissibleSequence::new(&c, p, 3.0, &cfg());
    assert!(matches!(r, Err(Error::NotAdmissible { .. })));
}

#[test]
fn iteration_cap_reports_the_tail() {
    let c = plane(Norm::euclidean(2));
    let p = pts(&c, &[[0.0, 0.0], [1.0, 1.0], [2.0, -1.0], [3.0, 1.0], [4.0, 0.0]]);
    let s = AdmissibleSequence::new(&c, p, f64::INFINITY, &cfg()).unwrap();
    let opts = ShortenConfig { max_iter: 5, ..Default::default() };
    match shorten_to_geodesic(&c, &s, &cfg(), &opts) {
        Err(Error::NonConvergence { iterations, tail, .. }) => {
            assert_eq!(iterations, 5);
            assert_eq!(tail.len(), 6);
        }
        r => panic!("{r:?}"),
    }
}

#[test]
fn endpoints_are_copied() {
    let c = skewed();
    let p = pts(&c, &[[0.1, 0.7], [0.3, 0.2], [0.2, -0.5]]);
    let s = AdmissibleSequence::new(&c, p.clone(), f64::INFINITY, &cfg()).unwrap();
    let t = shorten_step(&c, &s, &cfg()).unwrap();
    assert_eq!(t.points()[0], p[0]);
    assert_eq!(t.points()[2], p[2]);
}

#[test]
fn homotopy_in_one_face() {
    let c = plane(Norm::lp(2, 3.0).unwrap());
    let family: Vec<VertexPath> = (0..5)
        .map(|k| {
            let y = 0.1 * k as f64;
            VertexPath::from_points(&c, &pts(&c, &[[0.0, 0.0], [0.5, y], [1.0, 0.0]])).unwrap()
        })
        .collect();
    let r = homotopy_unique(&c, &family, 0.5, &cfg(), &ShortenConfig::default()).unwrap();
    assert!(r.all_equal, "{r:?}");
    assert!(r.pieces as f64 > 2.0 * r.l0 / r.rho);
    assert!(!r.violation);
    let coarse = [family[0].clone(), family[4].clone()];
    assert!(matches!(homotopy_unique(&c, &coarse, 0.3, &cfg(), &ShortenConfig::default()), Err(Error::Input(_))));
}

#[test]
fn homotopy_around_a_cone_apex() {
    // Five sectors of angle 0.5 make a cone of total angle 2.5 > 2; paths on
    // either side of the apex still converge to one geodesic.
    let c = sectors(5, 0.5);
    let a = Point::new(0, [0.8 * 0.25f64.cos(), 0.8 * 0.25f64.sin()]);
    let b = Point::new(2, [0.8 * 0.25f64.cos(), 0.8 * 0.25f64.sin()]);
    let mid = |r: f64| Point::new(1, [r * 0.25f64.cos(), r * 0.25f64.sin()]);
    let family: Vec<VertexPath> = [0.9, 1.0, 1.1]
        .iter()
        .map(|&r| {
            let s1 = crate::paths::local_distance(&c, &a, &mid(r), &cfg()).unwrap().1;
            let s2 = crate::paths::local_distance(&c, &mid(r), &b, &cfg()).unwrap().1;
            s1.join(&s2)
        })
        .collect();
    let r = homotopy_unique(&c, &family, 0.6, &cfg(), &ShortenConfig::default()).unwrap();
    assert!(r.all_equal, "{r:?}");
}

#[test]
fn radius_of_an_isolated_face_is_its_inradius() {
    let f = crate::complex::Face::polygon(0, &[[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]], Norm::euclidean(2)).unwrap();
    let c = Complex::new(vec![f], vec![]).unwrap();
    let p = Point::new(0, [1.0, 0.7]);
    let r = uniqueness_radius(&c, &p, &RadiusConfig { r_max: 0.7, ..Default::default() }, &cfg());
    assert!((r.radius - 0.7).abs() < 1e-9, "{r:?}");
    assert!((boundary_metric_distance(&c, &p) - 0.7).abs() < 1e-9);
}

#[test]
fn radius_on_the_gluing_line_is_positive() {
    let c = skewed();
    let r = uniqueness_radius(&c, &Point::new(0, [0.0, 0.0]), &RadiusConfig::default(), &cfg());
    assert!(r.radius > 0.0 && r.warning.is_none(), "{r:?}");
    assert!(r.samples > 0);
}

#[test]
fn radius_at_the_flag_is_small() {
    let c = crate::fixtures::flag(0.5, 0.2);
    let rc = RadiusConfig { pairs: 64, r_max: 1.0, ..Default::default() };
    let r = uniqueness_radius(&c, &Point::new(1, [0.0, 0.1]), &rc, &cfg());
    assert!(r.radius < 0.5, "{r:?}");
}

fn seq_from(c: &Complex, raw: &[(f64, f64)]) -> Option<AdmissibleSequence> {
    let mut xs = vec![[0.0, 0.8]];
    xs.extend(raw.iter().map(|&(x, y)| [x, y]));
    xs.push([0.1, -0.8]);
    AdmissibleSequence::new(c, pts(c, &xs), f64::INFINITY, &cfg()).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_is_monotone(raw in proptest::collection::vec((-0.5..0.5f64, -0.7..0.7f64), 1..6)) {
        let c = skewed();
        let s = seq_from(&c, &raw).unwrap();
        let t = shorten_step(&c, &s, &cfg()).unwrap();
        prop_assert!(t.length() <= s.length() + 1e-9);
        prop_assert!(t.max_edge() <= s.max_edge() + 1e-9);
        prop_assert!(t.energy() <= s.energy() + 1e-9);
        let (l, m) = (s.edge_lengths(), t.edge_lengths());
        let n = l.len();
        if n >= 2 {
            prop_assert!(m[0] <= 0.75 * l[0] + 0.25 * l[1] + 1e-9);
            prop_assert!(m[n - 1] <= 0.25 * l[n - 2] + 0.75 * l[n - 1] + 1e-9);
            for i in 1..n - 1 {
                prop_assert!(m[i] <= 0.25 * l[i - 1] + 0.5 * l[i] + 0.25 * l[i + 1] + 1e-9);
            }
        }
        if (t.length() - s.length()).abs() <= 1e-9 {
            prop_assert!(is_geodesic_sequence(&c, s.points(), &cfg(), 1e-6).unwrap());
        }
    }
}
