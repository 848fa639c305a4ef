use serde::{Deserialize, Serialize};

use super::search::local_distance;
use super::VertexPath;
use crate::complex::{Complex, Point};
use crate::config::SearchConfig;
use crate::error::Result;
use crate::geom::{self, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexTest {
    /// Both neighbors in one face: compare with the chord.
    Chord,
    /// Vertex inside a glued edge: one-sided derivatives of sliding along it.
    Slide,
    /// Vertex at a corner: shortcut between points on the two arms.
    Arm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexCheck {
    pub index: usize,
    pub test: VertexTest,
    /// Nonnegative up to tolerance when locally minimizing.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicCheck {
    pub geodesic: bool,
    pub worst_margin: f64,
    pub vertices: Vec<VertexCheck>,
}

/// The consecutive-triple condition |x_{i-1}x_i| + |x_i x_{i+1}| = |x_{i-1}x_{i+1}|
/// with local distances, to relative tolerance `tol`.
pub fn is_geodesic_sequence(complex: &Complex, points: &[Point], cfg: &SearchConfig, tol: f64) -> Result<bool> {
    for w in points.windows(3) {
        let d1 = local_distance(complex, &w[0], &w[1], cfg)?.0;
        let d2 = local_distance(complex, &w[1], &w[2], cfg)?.0;
        let d = local_distance(complex, &w[0], &w[2], cfg)?.0;
        if d1 + d2 > d + tol * (d1 + d2).max(1e-300) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One-sided derivatives of the length when the shared vertex slides along
/// the edge; `u` in the chart of the first face, `mu` its image in the second.
fn slide_margin(complex: &Complex, path: &VertexPath, i: usize, u: Vec2, mu: Vec2) -> f64 {
    let s0 = path.segments()[i - 1];
    let s1 = path.segments()[i];
    let n0 = &complex.face(s0.face).norm;
    let n1 = &complex.face(s1.face).norm;
    let w0 = geom::sub(s0.to, s0.from);
    let w1 = geom::sub(s1.to, s1.from);
    let neg = |x: Vec2| geom::scale(x, -1.0);
    let plus = n0.dir_deriv_plus(&w0, &u) + n1.dir_deriv_plus(&w1, &neg(mu));
    let minus = n0.dir_deriv_plus(&w0, &neg(u)) + n1.dir_deriv_plus(&w1, &mu);
    plus.min(minus)
}

/// Local minimality at every interior vertex of a broken line.
pub fn is_geodesic_path(complex: &Complex, path: &VertexPath, cfg: &SearchConfig, tol: f64) -> Result<GeodesicCheck> {
    let segs = path.segments();
    let mut out = Vec::new();
    let mut ok = true;
    for i in 1..segs.len() {
        let (s0, s1) = (segs[i - 1], segs[i]);
        let scale = s0.length + s1.length;
        let check = if s0.face == s1.face {
            let chord = complex.face(s0.face).length(s0.from, s1.to);
            VertexCheck { index: i, test: VertexTest::Chord, margin: (chord - scale) / scale }
        } else if let Some((u, mu)) = slide_directions(complex, &Point::new(s0.face, s0.to), &Point::new(s1.face, s1.from)) {
            VertexCheck { index: i, test: VertexTest::Slide, margin: slide_margin(complex, path, i, u, mu) }
        } else {
            let eta = 0.45 * s0.length.min(s1.length);
            let a = Point::new(s0.face, geom::lerp(s0.to, s0.from, eta / s0.length));
            let b = Point::new(s1.face, geom::lerp(s1.from, s1.to, eta / s1.length));
            let d = local_distance(complex, &a, &b, cfg)?.0;
            VertexCheck { index: i, test: VertexTest::Arm, margin: (d - 2.0 * eta) / (2.0 * eta) }
        };
        ok &= check.margin >= -tol;
        out.push(check);
    }
    let worst = out.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
    Ok(GeodesicCheck { geodesic: ok, worst_margin: worst, vertices: out })
}

/// Edge direction at a point interior to an edge glued between the two faces,
/// in both charts. `None` at corners or when the faces are not glued there.
pub(crate) fn slide_directions(complex: &Complex, p: &Point, q: &Point) -> Option<(Vec2, Vec2)> {
    let f = complex.face(p.face);
    if f.corner_at(p.coords, 1e-9).is_some() {
        return None;
    }
    for e in f.edges_at(p.coords, 1e-9) {
        for link in complex.links(p.face, e) {
            if link.face != q.face {
                continue;
            }
            let y = complex.map_across(link, p.coords);
            if geom::dist(y, q.coords) <= 1e-7 * (1.0 + geom::len(y)) {
                let u = f.edge(e).dir;
                return Some((u, geom::mat_vec(&complex.link_matrix(link), u)));
            }
        }
    }
    None
}
