//! Small helpers for 2-vectors in chart coordinates.

pub type Vec2 = [f64; 2];

#[inline]
pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn scale(a: Vec2, t: f64) -> Vec2 {
    [a[0] * t, a[1] * t]
}

#[inline]
pub fn axpy(a: Vec2, t: f64, d: Vec2) -> Vec2 {
    [a[0] + t * d[0], a[1] + t * d[1]]
}

#[inline]
pub fn lerp(a: Vec2, b: Vec2, t: f64) -> Vec2 {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

#[inline]
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn len(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist(a: Vec2, b: Vec2) -> f64 {
    len(sub(a, b))
}

#[inline]
pub fn perp(a: Vec2) -> Vec2 {
    [-a[1], a[0]]
}

/// Row-major 2x2 matrix times vector.
#[inline]
pub fn mat_vec(m: &[f64; 4], v: Vec2) -> Vec2 {
    [m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]]
}

#[inline]
pub fn det(m: &[f64; 4]) -> f64 {
    m[0] * m[3] - m[1] * m[2]
}

pub fn inverse(m: &[f64; 4]) -> Option<[f64; 4]> {
    let d = det(m);
    let s = m.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if !(d.abs() > 1e-14 * s * s) {
        return None;
    }
    Some([m[3] / d, -m[1] / d, -m[2] / d, m[0] / d])
}

pub fn mat_mul(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}
