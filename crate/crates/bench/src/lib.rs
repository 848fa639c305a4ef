//! Inputs shared by the benchmarks.

use finsler_pl::gallery::{build_glued_half_planes, build_russian_flag};
use finsler_pl::paths::VertexPath;
use finsler_pl::shortening::AdmissibleSequence;
use finsler_pl::{Complex, Norm, Point, SearchConfig};

pub fn norms() -> Vec<(&'static str, Norm)> {
    vec![
        ("euclidean", Norm::euclidean(2)),
        ("ellipsoidal", Norm::ellipsoidal(2, vec![2.0, 0.3, 0.3, 1.0]).unwrap()),
        ("lp3", Norm::lp(2, 3.0).unwrap()),
        (
            "max-of",
            Norm::max_of(vec![
                Norm::ellipsoidal(2, vec![1.0, 0.4, 0.4, 1.0]).unwrap(),
                Norm::ellipsoidal(2, vec![1.0, -0.4, -0.4, 1.0]).unwrap(),
            ])
            .unwrap(),
        ),
    ]
}

pub fn half_planes() -> Complex {
    (*build_glued_half_planes(0.5, -0.5).unwrap().complex).clone()
}

pub fn flag() -> Complex {
    (*build_russian_flag(0.3, 1.0).unwrap().complex).clone()
}

/// A zigzag across the x-axis of the half-planes, subdivided into `n` edges.
pub fn zigzag(complex: &Complex, n: usize) -> AdmissibleSequence {
    let pts = [
        Point::new(0, [-1.5, 0.5]),
        Point::new(0, [-1.0, 0.0]),
        Point::new(1, [-0.5, -0.5]),
        Point::new(1, [0.0, 0.0]),
        Point::new(0, [0.5, 0.5]),
        Point::new(0, [1.0, 0.0]),
        Point::new(1, [1.5, -0.5]),
    ];
    let path = VertexPath::from_points(complex, &pts).unwrap();
    AdmissibleSequence::subdivide(complex, &path, n, 100.0, &SearchConfig::default()).unwrap()
}
