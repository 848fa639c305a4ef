use serde::{Deserialize, Serialize};

use super::geodesic::slide_directions;
use super::Segment;
use crate::complex::{Complex, FaceId, Point};
use crate::error::{Error, Result};
use crate::geom::{self, Vec2};
use crate::norms::Norm;

/// Piece of an orthogonal slice in one face: `point + t * direction` for `t` in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlicePiece {
    pub face: FaceId,
    pub point: Vec2,
    pub direction: Vec2,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSlice {
    pub segment: Segment,
    pub t: f64,
    pub pieces: Vec<SlicePiece>,
    /// Largest disagreement of the face derivatives on shared edge directions.
    pub agreement_defect: f64,
}

fn clip_line(complex: &Complex, face: FaceId, x: Vec2, w: Vec2) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for e in complex.face(face).edges() {
        let a = geom::dot(e.normal, w);
        let b = -e.excess(x);
        if a > 1e-15 {
            hi = hi.min(b / a);
        } else if a < -1e-15 {
            lo = lo.max(b / a);
        }
    }
    (lo.min(0.0), hi.max(0.0))
}

/// Orthogonal slice through the point at fraction `t` of a segment.
pub fn orth_slice(complex: &Complex, segment: &Segment, t: f64) -> Result<LocalSlice> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Input("slice parameter must lie strictly inside the segment".into()));
    }
    let x = geom::lerp(segment.from, segment.to, t);
    let f = complex.face(segment.face);
    let d = geom::sub(segment.to, segment.from);
    let v = geom::scale(d, 1.0 / f.norm.value(&d));
    let w = f.norm.orth_direction_2d(v)?;
    let (lo, hi) = clip_line(complex, segment.face, x, w);
    let mut pieces = vec![SlicePiece { face: segment.face, point: x, direction: w, lo, hi }];
    let mut defect = 0.0f64;
    let here = Point::new(segment.face, x);
    for r in complex.representations(&here).into_iter().skip(1) {
        let Some((u, mu)) = slide_directions(complex, &here, &r) else { continue };
        let g = complex.face(r.face);
        // The segment lies along the edge here, so its direction maps with the edge.
        let scale_v = geom::dot(v, u);
        let vg = geom::scale(mu, scale_v);
        let wg = g.norm.orth_direction_2d(vg)?;
        let (lo, hi) = clip_line(complex, r.face, r.coords, wg);
        pieces.push(SlicePiece { face: r.face, point: r.coords, direction: wg, lo, hi });
        let df = f.norm.grad(&v)?;
        let dg = g.norm.grad(&vg)?;
        defect = defect.max((geom::dot([df[0], df[1]], u) - geom::dot([dg[0], dg[1]], mu)).abs());
    }
    Ok(LocalSlice { segment: *segment, t, pieces, agreement_defect: defect })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusemannReport {
    /// N(q - γ(t)) >= |t - t0| - tol at every sample.
    pub lower_bound_holds: bool,
    pub min_gap: f64,
    /// Minimum gap away from t0 when q is off the line; must be positive.
    pub strict: Option<bool>,
    /// Gap non-increasing in |t - t0| on both sides.
    pub decay_monotone: bool,
    pub final_gap: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Check N(q - γ(t)) >= |t - t0| and its asymptotic tightness along the line
/// γ(t) = a + t v, for q on the orthogonal slice at t0.
pub fn busemann_check(norm: &Norm, a: &[f64], v: &[f64], q: &[f64], t0: f64, ts: &[f64], tol: f64) -> Result<BusemannReport> {
    let n = norm.dim();
    if a.len() != n || v.len() != n || q.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.len().max(v.len()).max(q.len()) });
    }
    if (norm.value(v) - 1.0).abs() > 1e-9 {
        return Err(Error::Input("direction must have unit norm".into()));
    }
    let g = norm.grad(v)?;
    let off: Vec<f64> = (0..n).map(|i| q[i] - a[i] - t0 * v[i]).collect();
    let offn = off.iter().map(|x| x * x).sum::<f64>().sqrt();
    let pairing: f64 = g.iter().zip(&off).map(|(x, y)| x * y).sum();
    if pairing.abs() > 1e-9 * (1.0 + offn) {
        return Err(Error::Input("q is not on the orthogonal slice at t0".into()));
    }
    let mut buf = vec![0.0; n];
    let mut samples = Vec::with_capacity(ts.len());
    for &t in ts {
        for i in 0..n {
            buf[i] = q[i] - a[i] - t * v[i];
        }
        samples.push((t, norm.value(&buf) - (t - t0).abs()));
    }
    let min_gap = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let off_line = norm.value(&off) > 1e-6;
    let strict = off_line.then(|| min_gap > 0.0);
    let mut sorted = samples.clone();
    sorted.sort_by(|x, y| (x.0 - t0).abs().total_cmp(&(y.0 - t0).abs()));
    let monotone = [1.0, -1.0].iter().all(|&side| {
        let gaps: Vec<f64> = sorted
            .iter()
            .filter(|s| (s.0 - t0) * side >= 0.0)
            .map(|s| s.1)
            .collect();
        gaps.windows(2).all(|w| w[1] <= w[0] + tol)
    });
    let final_gap = sorted.last().map_or(0.0, |s| s.1);
    Ok(BusemannReport {
        lower_bound_holds: min_gap >= -tol,
        min_gap,
        strict,
        decay_monotone: monotone,
        final_gap,
        samples,
    })
}
