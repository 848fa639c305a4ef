//! Midpoint shortening of vertex sequences and its limit.

mod homotopy;
mod radius;
#[cfg(test)]
mod tests;

pub use homotopy::{homotopy_unique, HomotopyReport};
pub use radius::{ball_point, boundary_metric_distance, trace, uniqueness_radius, RadiusEstimate};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, Point};
use crate::config::{SearchConfig, ShortenConfig};
use crate::error::{Error, Result};
use crate::paths::{local_distance, local_search, VertexPath};

/// A vertex sequence with fixed endpoints whose edges are unique shortest
/// paths: 2δ(s) < ρ̂.
#[derive(Debug, Clone)]
pub struct AdmissibleSequence {
    points: Vec<Point>,
    edges: Vec<VertexPath>,
    rho: f64,
}

fn unique_path(complex: &Complex, a: &Point, b: &Point, cfg: &SearchConfig) -> Result<VertexPath> {
    let r = local_search(complex, a, b, cfg, cfg.tie_tolerance)?;
    if r.tie {
        return Err(Error::NonUniqueMidpoint(format!(
            "edge ({}, {:?}) to ({}, {:?}) has two shortest paths",
            a.face, a.coords, b.face, b.coords
        )));
    }
    Ok(r.candidates[0].path.clone())
}

impl AdmissibleSequence {
    /// Connect consecutive points by their shortest paths and check 2δ < `rho`.
    pub fn new(complex: &Complex, points: Vec<Point>, rho: f64, cfg: &SearchConfig) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Input("a sequence needs at least two points".into()));
        }
        for p in &points {
            complex.check_point(p)?;
        }
        let edges = points
            .par_windows(2)
            .map(|w| unique_path(complex, &w[0], &w[1], cfg))
            .collect::<Result<Vec<_>>>()?;
        let s = Self { points, edges, rho };
        let twice_delta = 2.0 * s.max_edge();
        if !(twice_delta < rho) {
            return Err(Error::NotAdmissible { twice_delta, rho });
        }
        Ok(s)
    }

    /// Subdivide a broken line into `n` pieces of equal length.
    pub fn subdivide(complex: &Complex, path: &VertexPath, n: usize, rho: f64, cfg: &SearchConfig) -> Result<Self> {
        let n = n.max(1);
        let l = path.length();
        let mut pts: Vec<Point> = (0..=n).map(|k| path.at_length(l * k as f64 / n as f64)).collect();
        pts[0] = path.start();
        pts[n] = path.end();
        Self::new(complex, pts, rho, cfg)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn edges(&self) -> &[VertexPath] {
        &self.edges
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        self.edges.iter().map(VertexPath::length).collect()
    }

    pub fn length(&self) -> f64 {
        self.edge_lengths().iter().sum()
    }

    pub fn max_edge(&self) -> f64 {
        self.edge_lengths().into_iter().fold(0.0, f64::max)
    }

    pub fn energy(&self) -> f64 {
        self.edge_lengths().iter().map(|l| l * l).sum()
    }

    /// The broken line through all edges.
    pub fn path(&self) -> VertexPath {
        let mut it = self.edges.iter();
        let first = it.next().expect("at least one edge").clone();
        it.fold(first, |acc, e| acc.join(e))
    }
}

/// Displacement between two positions of a vertex, measured as a norm length.
fn displacement(complex: &Complex, a: &Point, b: &Point, cfg: &SearchConfig) -> f64 {
    match complex.face_distance(a, b) {
        Some((d, _, _)) => d,
        None => local_distance(complex, a, b, cfg).map_or(f64::INFINITY, |r| r.0),
    }
}

/// One application of T: midpoints of edges, then midpoints of consecutive midpoints.
pub fn shorten_step(complex: &Complex, s: &AdmissibleSequence, cfg: &SearchConfig) -> Result<AdmissibleSequence> {
    let n = s.edges.len();
    if n < 2 {
        return Ok(s.clone());
    }
    let ys: Vec<Point> = s.edges.iter().map(|e| complex.canonical(&e.at_fraction(0.5))).collect();
    let inner = ys
        .par_windows(2)
        .map(|w| {
            let p = unique_path(complex, &w[0], &w[1], cfg)?;
            Ok(complex.canonical(&p.at_fraction(0.5)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut points = Vec::with_capacity(n + 1);
    points.push(s.points[0]);
    points.extend(inner);
    points.push(s.points[n]);
    let edges = points
        .par_windows(2)
        .map(|w| unique_path(complex, &w[0], &w[1], cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(AdmissibleSequence { points, edges, rho: s.rho })
}

/// Largest vertex displacement between two sequences of the same size.
pub fn max_displacement(complex: &Complex, a: &AdmissibleSequence, b: &AdmissibleSequence, cfg: &SearchConfig) -> f64 {
    a.points
        .par_iter()
        .zip(&b.points)
        .map(|(x, y)| displacement(complex, x, y, cfg))
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub iteration: usize,
    pub length: f64,
    pub max_edge: f64,
    pub energy: f64,
    pub displacement: f64,
}

#[derive(Debug, Clone)]
pub struct Shortened {
    pub sequence: AdmissibleSequence,
    pub iterations: usize,
    pub log: Vec<StepLog>,
}

impl Shortened {
    pub fn path(&self) -> VertexPath {
        self.sequence.path()
    }
}

/// Iterate T until the remaining displacement, extrapolated from the observed
/// contraction rate, falls below `opts.tol`.
pub fn shorten_to_geodesic(
    complex: &Complex,
    s: &AdmissibleSequence,
    cfg: &SearchConfig,
    opts: &ShortenConfig,
) -> Result<Shortened> {
    let log_of = |it: usize, q: &AdmissibleSequence, d: f64| StepLog {
        iteration: it,
        length: q.length(),
        max_edge: q.max_edge(),
        energy: q.energy(),
        displacement: d,
    };
    let mut cur = s.clone();
    let mut log = vec![log_of(0, &cur, f64::NAN)];
    let mut prev_disp = f64::INFINITY;
    let mut stalled = 0;
    for it in 1..=opts.max_iter {
        let next = shorten_step(complex, &cur, cfg)?;
        let d = max_displacement(complex, &cur, &next, cfg);
        log.push(log_of(it, &next, d));
        cur = next;
        let rate = if prev_disp.is_finite() && prev_disp > 0.0 { (d / prev_disp).min(0.999_999) } else { 0.999_999 };
        stalled = if d >= prev_disp { stalled + 1 } else { 0 };
        prev_disp = d;
        // Remaining distance to the limit is about d * rate / (1 - rate).
        if d == 0.0 || d * rate < opts.tol * (1.0 - rate) || (d < opts.tol && stalled >= 3) {
            return Ok(Shortened { sequence: cur, iterations: it, log });
        }
    }
    let tail = log
        .iter()
        .rev()
        .take(opts.tail)
        .rev()
        .map(|l| (l.iteration, l.displacement))
        .collect();
    Err(Error::NonConvergence { iterations: opts.max_iter, last_displacement: prev_disp, tail })
}
