use super::*;
use crate::complex::{Complex, Face, Point};
use crate::config::SearchConfig;
use crate::fixtures::{flag, half_planes, plane, quad};
use crate::norms::Norm;
use crate::paths::{is_geodesic_sequence, local_distance};

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

#[test]
fn unit_square_lattice() {
    let f = Face::polygon(0, &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], Norm::euclidean(2)).unwrap();
    let c = Complex::new(vec![f], vec![]).unwrap();
    let g = build_graph(&c, &Region::new([0.0, 0.0, 1.0, 1.0]), 0.5, None).unwrap();
    assert_eq!(g.node_count(), 9);
    let r = oracle_distance(&c, &g, &Point::new(0, [0.0, 0.0]), &Point::new(0, [1.0, 1.0])).unwrap();
    assert!((r.distance_upper - 2f64.sqrt()).abs() < 1e-12);
    assert!(g.edge_count() > 0);
}

#[test]
fn unbounded_region_is_rejected() {
    let c = plane(Norm::euclidean(2));
    let r = build_graph(&c, &Region::new([0.0, 0.0, f64::INFINITY, 1.0]), 0.5, None);
    assert!(matches!(r, Err(crate::error::Error::Input(_))));
}

#[test]
fn gluing_line_nodes_are_shared() {
    let c = half_planes(Norm::euclidean(2), Norm::euclidean(2));
    let g = build_graph(&c, &Region::new([-1.0, -1.0, 1.0, 1.0]), 0.25, None).unwrap();
    // 9 columns by 9 rows, the middle row shared.
    assert_eq!(g.node_count(), 81);
    assert_eq!(g.face_nodes(0).len(), 45);
    assert_eq!(g.face_nodes(1).len(), 45);
}

#[test]
fn halving_quadruples_nodes() {
    let c = half_planes(Norm::euclidean(2), Norm::euclidean(2));
    let region = Region::new([-1.0, -1.0, 1.0, 1.0]);
    let n1 = build_graph(&c, &region, 0.1, None).unwrap().node_count() as f64;
    let n2 = build_graph(&c, &region, 0.05, None).unwrap().node_count() as f64;
    assert!((n2 / n1 - 4.0).abs() < 0.3, "{}", n2 / n1);
}

#[test]
fn vertical_crossing_converges_to_two() {
    let c = half_planes(Norm::euclidean(2), Norm::euclidean(2));
    let g = build_graph(&c, &Region::new([-2.0, -2.0, 2.0, 2.0]), 0.1, None).unwrap();
    let r = oracle_distance(&c, &g, &Point::new(0, [-1.0, 1.0]), &Point::new(1, [-1.0, -1.0])).unwrap();
    assert!((r.distance_upper - 2.0).abs() < 1e-9);
    assert_eq!(r.snap_error, 0.0);
}

#[test]
fn oracle_bounds_and_refines() {
    let c = half_planes(quad(0.5), quad(-0.5));
    let region = Region::new([-1.5, -1.5, 1.5, 1.5]);
    let hop = 0.2;
    let coarse = build_graph(&c, &region, 0.05, Some(hop)).unwrap();
    let fine = build_graph(&c, &region, 0.025, Some(hop)).unwrap();
    let pairs = [([-0.7, 0.9], [0.6, -1.1]), ([0.3, 0.2], [-0.9, -0.4]), ([1.0, 1.0], [1.2, -0.1])];
    for (a, b) in pairs {
        let (a, b) = (Point::new(0, a), Point::new(1, b));
        let d = local_distance(&c, &a, &b, &cfg()).unwrap().0;
        let o1 = oracle_distance(&c, &coarse, &a, &b).unwrap().distance_upper;
        let o2 = oracle_distance(&c, &fine, &a, &b).unwrap().distance_upper;
        assert!(o1 >= d - 1e-9 && o2 >= d - 1e-9);
        assert!(o2 <= o1 + 1e-12);
        assert!(o2 - d < 0.005 * d, "{o2} vs {d}");
    }
}

#[test]
fn unreachable_target() {
    let f = |x0: f64| Face::polygon(0, &[[x0, 0.0], [x0 + 1.0, 0.0], [x0 + 1.0, 1.0], [x0, 1.0]], Norm::euclidean(2)).unwrap();
    let g1 = f(0.0);
    let mut g2 = f(3.0);
    g2.id = 1;
    let c = Complex::new(vec![g1, g2], vec![]).unwrap();
    let g = build_graph(&c, &Region::new([0.0, 0.0, 4.0, 1.0]), 0.25, None).unwrap();
    let r = oracle_distance(&c, &g, &Point::new(0, [0.5, 0.5]), &Point::new(1, [3.5, 0.5]));
    assert!(matches!(r, Err(crate::error::Error::Unreachable)));
}

#[test]
fn one_geodesic_in_a_face_and_across_smooth_gluings() {
    let c = plane(Norm::lp(2, 3.0).unwrap());
    let g = enumerate_geodesics(&c, &Point::new(0, [0.0, 0.0]), &Point::new(0, [1.0, 2.0]), &cfg(), 1e-6).unwrap();
    assert_eq!(g.paths.len(), 1);
    let c = half_planes(quad(0.5), quad(-0.5));
    let g = enumerate_geodesics(&c, &Point::new(0, [-0.3, 0.8]), &Point::new(1, [0.6, -0.5]), &cfg(), 1e-6).unwrap();
    assert_eq!(g.paths.len(), 1);
    let pts = g.paths[0].vertices();
    assert!(is_geodesic_sequence(&c, &pts, &cfg(), 1e-6).unwrap());
}

#[test]
fn flag_has_a_fan_of_geodesics() {
    let c = flag(0.5, 0.2);
    let g = enumerate_geodesics(&c, &Point::new(0, [0.0, 0.6]), &Point::new(2, [0.0, -0.6]), &cfg(), 1e-6).unwrap();
    assert!(g.paths.len() > 1, "{:?}", g.lengths());
    let ls = g.lengths();
    assert!(ls[ls.len() - 1] - ls[0] > 1e-4, "{ls:?}");
}

#[test]
fn scans() {
    let c = plane(Norm::euclidean(2));
    let r = uniqueness_scan(&c, &Region::new([-1.0, -1.0, 1.0, 1.0]), 0.5, 40, 3, &cfg()).unwrap();
    assert_eq!((r.ambiguous, r.failed), (0, 0));
    let c = flag(0.5, 0.2);
    let r = uniqueness_scan(&c, &Region::new([-0.3, -0.2, 0.3, 0.2]), 0.8, 60, 3, &cfg()).unwrap();
    assert!(r.ambiguous > 0, "{r:?}");
    assert!(!r.witnesses.is_empty());
    let again = uniqueness_scan(&c, &Region::new([-0.3, -0.2, 0.3, 0.2]), 0.8, 60, 3, &cfg()).unwrap();
    assert_eq!(r, again);
}
