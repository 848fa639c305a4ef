use serde::{Deserialize, Serialize};

use super::hull::HullVerdict;
use super::{is_saddle_cone, SaddleConeSurface};
use crate::error::{Error, Result};
use crate::geom::{self, Vec2};
use crate::paths::VertexPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    /// One path passes through the apex.
    ThroughApex,
    /// The region between the paths misses the apex.
    MissesApex,
    /// The region between the paths contains the apex.
    ContainsApex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case: CaseKind,
    /// Lengths of the two input paths.
    pub lengths: [f64; 2],
    /// Samples `(t, len(γ_t))` of the deformation family.
    pub family: Vec<(f64, f64)>,
    /// `½(len γ_0 + len γ_1) - len γ_½` for the family ends.
    pub midpoint_gap: Option<f64>,
    pub min_second_difference: Option<f64>,
    /// Second differences all at least `1e-8 L`.
    pub strictly_convex: Option<bool>,
    /// Generator index `j` and `d_0 f(v_j)` from the saddle certificate.
    pub apex_generator: Option<(usize, f64)>,
    /// `len [p, 0, q]`.
    pub apex_path_length: Option<f64>,
    /// Both paths are at least as long as `[p, 0, q]`.
    pub reduction_holds: Option<bool>,
}

const SAMPLES: usize = 33;

fn coords(p: &VertexPath) -> Vec<Vec2> {
    p.vertices().iter().map(|v| v.coords).collect()
}

fn seg_point_dist(a: Vec2, b: Vec2, x: Vec2) -> f64 {
    let d = geom::sub(b, a);
    let l2 = geom::dot(d, d);
    let t = if l2 > 0.0 { (geom::dot(geom::sub(x, a), d) / l2).clamp(0.0, 1.0) } else { 0.0 };
    geom::dist(geom::lerp(a, b, t), x)
}

fn seg_intersection(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> Option<Vec2> {
    let (r, s) = (geom::sub(b, a), geom::sub(d, c));
    let den = geom::cross(r, s);
    if den.abs() < 1e-300 {
        // Parallel: report a shared endpoint if any.
        return [c, d].into_iter().find(|&x| seg_point_dist(a, b, x) < 1e-12).or_else(|| {
            [a, b].into_iter().find(|&x| seg_point_dist(c, d, x) < 1e-12)
        });
    }
    let w = geom::sub(c, a);
    let t = geom::cross(w, s) / den;
    let u = geom::cross(w, r) / den;
    let eps = 1e-12;
    (t >= -eps && t <= 1.0 + eps && u >= -eps && u <= 1.0 + eps).then(|| geom::lerp(a, b, t))
}

fn through_apex(pts: &[Vec2]) -> bool {
    pts.windows(2).any(|w| seg_point_dist(w[0], w[1], [0.0, 0.0]) <= 1e-12)
}

fn winding(loop_pts: &[Vec2]) -> f64 {
    let mut total = 0.0;
    for w in loop_pts.windows(2) {
        total += geom::cross(w[0], w[1]).atan2(geom::dot(w[0], w[1]));
    }
    total / std::f64::consts::TAU
}

/// Points where a polyline crosses the rays of the fan, in order.
fn crossings(surface: &SaddleConeSurface, pts: &[Vec2]) -> Vec<(usize, Vec2)> {
    let mut out: Vec<(usize, Vec2)> = Vec::new();
    for w in pts.windows(2) {
        let mut here: Vec<(f64, usize, Vec2)> = Vec::new();
        for (i, &f) in surface.fan().iter().enumerate() {
            let far = geom::scale(f, 1e6 * (1.0 + geom::len(w[0]) + geom::len(w[1])));
            if let Some(x) = seg_intersection(w[0], w[1], [0.0, 0.0], far) {
                let d = geom::sub(w[1], w[0]);
                let t = geom::dot(geom::sub(x, w[0]), d) / geom::dot(d, d).max(1e-300);
                here.push((t, i, x));
            }
        }
        here.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, i, x) in here {
            if out.last().map_or(true, |l| geom::dist(l.1, x) > 1e-12) {
                out.push((i, x));
            }
        }
    }
    out
}

fn family_report(surface: &SaddleConeSurface, gamma: impl Fn(f64) -> Vec<Vec2>) -> (Vec<(f64, f64)>, f64, f64, bool) {
    let family: Vec<(f64, f64)> = (0..SAMPLES)
        .map(|k| {
            let t = k as f64 / (SAMPLES - 1) as f64;
            (t, surface.polyline_length(&gamma(t)))
        })
        .collect();
    let l = family.iter().map(|x| x.1).fold(0.0, f64::max);
    let mid = family[(SAMPLES - 1) / 2].1;
    let gap = 0.5 * (family[0].1 + family[SAMPLES - 1].1) - mid;
    let min2 = family.windows(3).map(|w| w[0].1 - 2.0 * w[1].1 + w[2].1).fold(f64::INFINITY, f64::min);
    let strict = min2 >= 1e-8 * l;
    (family, gap, min2, strict)
}

/// Classify a pair of distinct paths with common endpoints on a cone surface
/// and build the matching numerical witness.
pub fn case_witness(surface: &SaddleConeSurface, g0: &VertexPath, g1: &VertexPath) -> Result<CaseReport> {
    case_witness_polylines(surface, &coords(g0), &coords(g1))
}

/// As [`case_witness`], for plane polylines whose segments may cross rays.
pub fn case_witness_polylines(surface: &SaddleConeSurface, a: &[Vec2], b: &[Vec2]) -> Result<CaseReport> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Input("paths need at least two vertices".into()));
    }
    let (a, b) = (a.to_vec(), b.to_vec());
    let (p, q) = (a[0], a[a.len() - 1]);
    if geom::dist(p, b[0]) > 1e-9 || geom::dist(q, b[b.len() - 1]) > 1e-9 {
        return Err(Error::Input("paths must share their endpoints".into()));
    }
    for s in a.windows(2) {
        for t in b.windows(2) {
            if let Some(x) = seg_intersection(s[0], s[1], t[0], t[1]) {
                if geom::dist(x, p) > 1e-9 && geom::dist(x, q) > 1e-9 {
                    return Err(Error::Input(format!(
                        "paths meet at ({}, {}); split both at their last common point",
                        x[0], x[1]
                    )));
                }
            }
        }
    }
    let lengths = [surface.polyline_length(&a), surface.polyline_length(&b)];
    let mut report = CaseReport {
        case: CaseKind::MissesApex,
        lengths,
        family: Vec::new(),
        midpoint_gap: None,
        min_second_difference: None,
        strictly_convex: None,
        apex_generator: None,
        apex_path_length: None,
        reduction_holds: None,
    };
    let (ta, tb) = (through_apex(&a), through_apex(&b));
    if ta || tb {
        report.case = CaseKind::ThroughApex;
        let other = if ta { b } else { a };
        let gamma = |t: f64| {
            let mut v = vec![p];
            v.extend(other[1..other.len() - 1].iter().map(|&x| geom::scale(x, t)));
            v.push(q);
            v
        };
        let (family, gap, min2, strict) = family_report(surface, gamma);
        report.family = family;
        report.midpoint_gap = Some(gap);
        report.min_second_difference = Some(min2);
        report.strictly_convex = Some(strict);
        return Ok(report);
    }
    let mut loop_pts = a.clone();
    loop_pts.extend(b.iter().rev().skip(1));
    if winding(&loop_pts).abs() < 0.5 {
        let (ca, cb) = (crossings(surface, &a), crossings(surface, &b));
        if ca.len() != cb.len() || ca.iter().zip(&cb).any(|(x, y)| x.0 != y.0) {
            return Err(Error::Input("paths cross different rays; interpolation needs matching crossings".into()));
        }
        let gamma = |t: f64| {
            let mut v = vec![p];
            v.extend(ca.iter().zip(&cb).map(|(x, y)| geom::lerp(x.1, y.1, t)));
            v.push(q);
            v
        };
        let (family, gap, min2, strict) = family_report(surface, gamma);
        report.family = family;
        report.midpoint_gap = Some(gap);
        report.min_second_difference = Some(min2);
        report.strictly_convex = Some(strict);
        return Ok(report);
    }
    report.case = CaseKind::ContainsApex;
    let n = surface.ambient();
    let (rp, rq) = (surface.r(p), surface.r(q));
    let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<f64>>();
    let (np, nq) = (neg(&rp), neg(&rq));
    let f0 = n.value(&np) + n.value(&nq);
    report.apex_path_length = Some(f0);
    let tol = 1e-12 * (1.0 + f0);
    report.reduction_holds = Some(lengths.iter().all(|&l| l >= f0 - tol));
    if let HullVerdict::Contains { weights, .. } = is_saddle_cone(surface).verdict {
        let gens = surface.generators();
        let d0f = |v: &[f64]| n.dir_deriv_plus(&np, v) + n.dir_deriv_plus(&nq, v);
        report.apex_generator = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(j, _)| (j, d0f(&gens[j])))
            .max_by(|x, y| x.1.total_cmp(&y.1));
    }
    Ok(report)
}
