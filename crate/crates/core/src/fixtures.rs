//! Small complexes shared by unit tests.

use crate::complex::{Complex, Face, Gluing, HalfPlane};
use crate::norms::Norm;

pub fn quad(b: f64) -> Norm {
    Norm::ellipsoidal(2, vec![1.0, b, b, 1.0]).unwrap()
}

pub fn plane(norm: Norm) -> Complex {
    Complex::new(vec![Face::new(0, vec![], norm, true).unwrap()], vec![]).unwrap()
}

pub fn half_planes(up: Norm, down: Norm) -> Complex {
    let faces = vec![
        Face::new(0, vec![HalfPlane { normal: [0.0, -1.0], offset: 0.0 }], up, true).unwrap(),
        Face::new(1, vec![HalfPlane { normal: [0.0, 1.0], offset: 0.0 }], down, true).unwrap(),
    ];
    Complex::new(faces, vec![Gluing::identity(0, 0, 1, 0)]).unwrap()
}

/// Euclidean strips above and below a middle strip of width `w` carrying the
/// maximum of two sheared ellipses.
pub fn flag(b: f64, w: f64) -> Complex {
    let hw = 0.5 * w;
    let e = Norm::euclidean(2);
    let mid = Norm::max_of(vec![quad(b), quad(-b)]).unwrap();
    let faces = vec![
        Face::new(0, vec![HalfPlane { normal: [0.0, -1.0], offset: -hw }], e.clone(), true).unwrap(),
        Face::new(
            1,
            vec![HalfPlane { normal: [0.0, 1.0], offset: hw }, HalfPlane { normal: [0.0, -1.0], offset: hw }],
            mid,
            true,
        )
        .unwrap(),
        Face::new(2, vec![HalfPlane { normal: [0.0, 1.0], offset: -hw }], e, true).unwrap(),
    ];
    Complex::validated(faces, vec![Gluing::identity(0, 0, 1, 0), Gluing::identity(1, 1, 2, 0)]).unwrap()
}

/// `k` Euclidean sectors of angle `angle` around the origin.
pub fn sectors(k: usize, angle: f64) -> Complex {
    let ray = |i: usize| [(angle * i as f64).cos(), (angle * i as f64).sin()];
    let faces = (0..k).map(|i| Face::cone(i, ray(0), ray(1), Norm::euclidean(2)).unwrap()).collect();
    let (c, s) = (angle.cos(), angle.sin());
    // Rotation by -angle takes the second ray of a sector to the first.
    let gluings = (0..k)
        .map(|i| Gluing { face_a: i, sub_a: 1, face_b: (i + 1) % k, sub_b: 0, matrix: [c, s, -s, c], offset: [0.0, 0.0] })
        .collect();
    Complex::validated(faces, gluings).unwrap()
}
