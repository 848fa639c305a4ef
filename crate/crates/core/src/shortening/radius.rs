use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, Point};
use crate::config::{RadiusConfig, SearchConfig};
use crate::geom::{self, Vec2};
use crate::oracle::enumerate_geodesics;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    /// Conservative lower bound ρ̂.
    pub radius: f64,
    /// Bound that needs no sampling: half the metric distance to the face boundary,
    /// or the full distance for an isolated face.
    pub certified: f64,
    /// Pairs tested over the whole search.
    pub samples: usize,
    pub warning: Option<String>,
}

/// Metric distance from a point to the boundary of its face.
pub fn boundary_metric_distance(complex: &Complex, p: &Point) -> f64 {
    let f = complex.face(p.face);
    let mut best = f64::INFINITY;
    for e in f.edges() {
        let phi = |t: f64| f.norm.value(&geom::sub(e.point(t), p.coords));
        let t0 = e.clamp(e.param(p.coords));
        let reach = phi(t0) / f.norm_floor().max(1e-300) + 1.0;
        let (mut a, mut b) = ((t0 - reach).max(e.lo), (t0 + reach).min(e.hi));
        for _ in 0..200 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if phi(m1) < phi(m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        best = best.min(phi(0.5 * (a + b)).min(phi(t0)));
    }
    best
}

fn inward(complex: &Complex, p: &Point, v: Vec2) -> bool {
    let f = complex.face(p.face);
    f.edges_at(p.coords, 1e-9).iter().all(|&e| geom::dot(f.edge(e).normal, v) < -1e-12)
}

/// Follow a straight chart ray from `p` for metric length `length`, continuing
/// across edges through the gluing maps. Stops early at corners and free edges.
pub fn trace(complex: &Complex, p: &Point, dir: Vec2, length: f64) -> Point {
    let mut cur = *p;
    let mut v = dir;
    let mut left = length;
    for _ in 0..64 {
        let f = complex.face(cur.face);
        v = geom::scale(v, 1.0 / f.norm.value(&v));
        let mut t_exit = f64::INFINITY;
        let mut exit = None;
        for (i, e) in f.edges().iter().enumerate() {
            let a = geom::dot(e.normal, v);
            if a > 1e-15 {
                let t = (-e.excess(cur.coords) / a).max(0.0);
                if t < t_exit {
                    t_exit = t;
                    exit = Some(i);
                }
            }
        }
        if t_exit >= left {
            return Point::new(cur.face, geom::axpy(cur.coords, left, v));
        }
        let q = geom::axpy(cur.coords, t_exit, v);
        left -= t_exit;
        let e = exit.expect("finite exit has an edge");
        let links = complex.links(cur.face, e);
        if f.corner_at(q, 1e-9).is_some() || links.is_empty() {
            return Point::new(cur.face, q);
        }
        let link = links[0];
        let next = Point::new(link.face, complex.map_across(&link, q));
        let w = geom::mat_vec(&complex.link_matrix(&link), v);
        if !inward(complex, &next, w) {
            return Point::new(cur.face, q);
        }
        cur = next;
        v = w;
    }
    cur
}

/// A random point within metric distance `r` of `x`.
pub fn ball_point(complex: &Complex, x: &Point, r: f64, rng: &mut ChaCha8Rng) -> Point {
    let reps = complex.representations(x);
    for _ in 0..64 {
        let rep = reps[rng.gen_range(0..reps.len())];
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        let v = [a.cos(), a.sin()];
        if complex.face(rep.face).edges_at(rep.coords, 1e-9).is_empty() || inward(complex, &rep, v) {
            return trace(complex, &rep, v, r * rng.gen::<f64>().sqrt());
        }
    }
    *x
}

fn ambiguous_at(complex: &Complex, x: &Point, r: f64, n: usize, seed: u64, search: &SearchConfig) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Point, Point)> = (0..n)
        .map(|_| (ball_point(complex, x, r, &mut rng), ball_point(complex, x, r, &mut rng)))
        .collect();
    pairs.par_iter().any(|(a, b)| {
        enumerate_geodesics(complex, a, b, search, 1e-6).map_or(false, |g| g.paths.len() > 1)
    })
}

/// Sampled lower bound for the radius of the ball around `x` in which pairs
/// are joined by a single geodesic.
pub fn uniqueness_radius(complex: &Complex, x: &Point, cfg: &RadiusConfig, search: &SearchConfig) -> RadiusEstimate {
    let canon = complex.canonical(x);
    let reps = complex.representations(&canon);
    let d = boundary_metric_distance(complex, &canon);
    let isolated = reps.len() == 1 && complex.face(canon.face).edges().iter().enumerate().all(|(e, _)| complex.links(canon.face, e).is_empty());
    let certified = if reps.len() > 1 { 0.0 } else if isolated { d } else { 0.5 * d };
    let certified = certified.min(cfg.r_max);
    let mut samples = 0;
    let mut test = |r: f64, k: u64| {
        samples += cfg.pairs;
        ambiguous_at(complex, &canon, r, cfg.pairs, cfg.seed.wrapping_add(k), search)
    };
    let hi0 = cfg.r_max;
    if hi0 <= certified || !test(hi0, 0) {
        return RadiusEstimate { radius: hi0.max(certified), certified, samples, warning: None };
    }
    let (mut lo, mut hi) = (certified, hi0);
    if lo == 0.0 {
        let tiny = 1e-6 * hi0;
        if test(tiny, 1) {
            return RadiusEstimate {
                radius: 0.0,
                certified,
                samples,
                warning: Some(format!("ambiguous pairs already within radius {tiny:e}")),
            };
        }
        lo = tiny;
    }
    for k in 0..cfg.steps {
        let mid = 0.5 * (lo + hi);
        if test(mid, 2 + k as u64) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    RadiusEstimate { radius: lo, certified, samples, warning: None }
}
