use super::*;
use crate::complex::Point;
use crate::config::SearchConfig;
use crate::oracle::{uniqueness_scan, Region};
use crate::paths::VertexPath;

fn quadrant_graph(sx: f64, sy: f64, ambient: Norm) -> SaddleConeSurface {
    // Graph of z = sx |x| + sy |y| over the four quadrants.
    let fan = vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
    let images = vec![vec![1.0, 0.0, sx], vec![0.0, 1.0, sy], vec![-1.0, 0.0, sx], vec![0.0, -1.0, sy]];
    SaddleConeSurface::from_ray_images(ambient, fan, images).unwrap()
}

fn lp3() -> Norm {
    Norm::lp(3, 3.0).unwrap()
}

fn path(c: &Complex, pts: &[[f64; 2]]) -> VertexPath {
    let p: Vec<Point> = pts
        .iter()
        .map(|&x| {
            let f = (0..c.faces().len()).find(|&f| c.face(f).contains(x, 1e-12)).unwrap();
            Point::new(f, x)
        })
        .collect();
    VertexPath::from_points(c, &p).unwrap()
}

#[test]
fn flat_plane_is_saddle() {
    let t = is_saddle_cone(&SaddleConeSurface::flat());
    match t.verdict {
        HullVerdict::Contains { weights, residual } => {
            assert!(residual < 1e-10);
            assert!(weights.iter().all(|&w| w >= 0.0));
            assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        v => panic!("{v:?}"),
    }
}

#[test]
fn monkey_free_saddle_graph() {
    let t = is_saddle_cone(&quadrant_graph(1.0, -1.0, lp3()));
    assert!(t.contains());
    assert!(t.exact);
}

#[test]
fn convex_graph_is_separated() {
    let t = is_saddle_cone(&quadrant_graph(1.0, 1.0, lp3()));
    match t.verdict {
        HullVerdict::Separated { functional, margin } => {
            assert!(margin > 0.0);
            assert!(functional[0].abs() < 1e-9 && functional[1].abs() < 1e-9);
            assert!((functional[2] - 1.0).abs() < 1e-9);
        }
        v => panic!("{v:?}"),
    }
}

#[test]
fn exact_simplex_agrees_on_small_sets() {
    let pts = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
    let w = exact_feasible(&pts).unwrap();
    assert_eq!(w, vec![0.5, 0.5]);
    assert!(exact_feasible(&[vec![1.0, 0.0], vec![0.0, 1.0]]).is_none());
    let (x, _, _) = min_norm_point(&[vec![1.0, 1.0], vec![1.0, -1.0]]);
    assert!((x[0] - 1.0).abs() < 1e-12 && x[1].abs() < 1e-12);
}

#[test]
fn surfaces_are_validated() {
    let fan = vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
    let id = vec![1.0, 0.0, 0.0, 1.0];
    let mut maps = vec![id.clone(); 4];
    maps[1] = vec![2.0, 0.0, 0.0, 1.0];
    let r = SaddleConeSurface::new(Norm::euclidean(2), fan.clone(), maps);
    assert!(matches!(r, Err(Error::Validation(_))));
    let mut maps = vec![id; 4];
    maps[2] = vec![1.0, 0.0, 1.0, 0.0];
    let r = SaddleConeSurface::new(Norm::euclidean(2), fan, maps);
    assert!(matches!(r, Err(Error::Validation(_))));
}

#[test]
fn induced_complex_of_a_saddle_graph() {
    let s = quadrant_graph(1.0, -1.0, lp3());
    let c = induced_complex(&s).unwrap();
    assert_eq!(c.faces().len(), 4);
    assert!(c.validate().valid);
    let flat = induced_complex(&SaddleConeSurface::flat()).unwrap();
    let d = flat.face(0).length([0.0, 0.0], [0.6, 0.8]);
    assert!((d - 1.0).abs() < 1e-12);
}

#[test]
fn spec_roundtrip() {
    let s = quadrant_graph(0.5, -0.5, lp3());
    let j = serde_json::to_string(&s.to_spec()).unwrap();
    let back = SaddleConeSurface::from_spec(&serde_json::from_str(&j).unwrap()).unwrap();
    assert_eq!(back, s);
}

fn grid_mesh(n: usize, z: impl Fn(f64, f64) -> f64) -> Mesh {
    let mut vertices = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            let (x, y) = (i as f64 / n as f64 * 2.0 - 1.0, j as f64 / n as f64 * 2.0 - 1.0);
            vertices.push(vec![x, y, z(x, y)]);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::new();
    for j in 0..n {
        for i in 0..n {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Mesh { vertices, triangles }
}

#[test]
fn meshes() {
    let r = is_saddle_surface(&grid_mesh(8, |x, y| x * x - y * y)).unwrap();
    let interior: Vec<_> = r.iter().filter(|v| v.interior).collect();
    assert_eq!(interior.len(), 49);
    assert!(interior.iter().all(|v| v.saddle == Some(true)));
    assert!(r.iter().filter(|v| !v.interior).all(|v| v.saddle.is_none()));

    let r = is_saddle_surface(&grid_mesh(8, |x, y| -(x * x + y * y))).unwrap();
    assert!(r.iter().filter(|v| v.interior).all(|v| v.saddle == Some(false)));

    let r = is_saddle_surface(&grid_mesh(4, |_, _| 0.0)).unwrap();
    assert!(r.iter().filter(|v| v.interior).all(|v| v.saddle == Some(true)));

    let bad = Mesh { vertices: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]], triangles: vec![[0, 1, 2]] };
    assert!(matches!(is_saddle_surface(&bad), Err(Error::Validation(_))));
}

#[test]
fn case_one_on_the_plane() {
    let s = SaddleConeSurface::flat();
    let g1 = [[1.0, 0.5], [0.0, 0.0], [-1.0, 0.5]];
    let g0 = [[1.0, 0.5], [0.3, 1.0], [-1.0, 0.5]];
    let r = case_witness_polylines(&s, &g0, &g1).unwrap();
    assert_eq!(r.case, CaseKind::ThroughApex);
    assert_eq!(r.family.len(), 33);
    assert!(r.midpoint_gap.unwrap() > 0.0);
    assert_eq!(r.strictly_convex, Some(true));
}

#[test]
fn case_two_on_a_saddle() {
    let s = quadrant_graph(1.0, -1.0, lp3());
    let c = induced_complex(&s).unwrap();
    let g0 = path(&c, &[[1.0, 0.5], [0.0, 0.8], [-1.0, 0.5]]);
    let g1 = path(&c, &[[1.0, 0.5], [0.0, 1.2], [-1.0, 0.5]]);
    let r = case_witness(&s, &g0, &g1).unwrap();
    assert_eq!(r.case, CaseKind::MissesApex);
    assert!(r.min_second_difference.unwrap() > 0.0);
    assert_eq!(r.strictly_convex, Some(true));
    for w in [0usize, 32] {
        assert!((r.family[w].1 - r.lengths[w / 32]).abs() < 1e-12);
    }
}

#[test]
fn case_three_on_a_saddle() {
    let s = quadrant_graph(1.0, -1.0, lp3());
    let g0 = [[1.0, 0.3], [0.0, 1.0], [-1.0, 0.3]];
    let g1 = [[1.0, 0.3], [1.0, 0.0], [1.0, -1.0], [0.0, -1.0], [-1.0, -1.0], [-1.0, 0.0], [-1.0, 0.3]];
    let r = case_witness_polylines(&s, &g0, &g1).unwrap();
    let c = induced_complex(&s).unwrap();
    let via = case_witness(&s, &path(&c, &g0), &path(&c, &g1)).unwrap();
    assert_eq!(via, r);
    assert_eq!(r.case, CaseKind::ContainsApex);
    let (_, v) = r.apex_generator.unwrap();
    assert!(v >= -1e-12);
    assert!(r.apex_path_length.unwrap() > 0.0);
}

#[test]
fn crossing_paths_are_refused() {
    let s = SaddleConeSurface::flat();
    let c = induced_complex(&s).unwrap();
    let g0 = path(&c, &[[1.0, 0.5], [0.0, 1.0], [-1.0, 0.5]]);
    let g1 = path(&c, &[[1.0, 0.5], [0.0, 0.2], [-0.5, 1.5], [-1.0, 0.5]]);
    assert!(matches!(case_witness(&s, &g0, &g1), Err(Error::Input(_))));
}

#[test]
fn apex_distance_function_is_convex() {
    let n = lp3();
    let (rp, rq) = ([1.0, 0.2, 0.5], [-0.7, 0.4, -0.3]);
    let f = |x: [f64; 3]| {
        let a: Vec<f64> = (0..3).map(|i| x[i] - rp[i]).collect();
        let b: Vec<f64> = (0..3).map(|i| x[i] - rq[i]).collect();
        n.value(&a) + n.value(&b)
    };
    for k in 0..20 {
        let o = [0.1 * k as f64, -0.05 * k as f64, 0.3];
        let d = [0.3, 0.7, -0.2 + 0.01 * k as f64];
        let at = |t: f64| [o[0] + t * d[0], o[1] + t * d[1], o[2] + t * d[2]];
        for i in 1..40 {
            let t = i as f64 * 0.05;
            assert!(f(at(t - 0.05)) - 2.0 * f(at(t)) + f(at(t + 0.05)) >= -1e-10);
        }
    }
}

#[test]
fn saddle_induced_complex_has_no_ambiguous_pairs() {
    let s = quadrant_graph(0.8, -0.6, lp3());
    let c = induced_complex(&s).unwrap();
    let r = uniqueness_scan(&c, &Region::new([-1.0, -1.0, 1.0, 1.0]), 1.0, 40, 11, &SearchConfig::default()).unwrap();
    assert_eq!(r.ambiguous, 0, "{r:?}");
}
