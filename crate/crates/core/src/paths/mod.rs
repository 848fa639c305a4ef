//! Broken lines, local distances and midpoints, geodesic tests and slices.

mod export;
mod geodesic;
pub(crate) mod search;
mod slice;
pub(crate) mod solver;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, FaceId, Point};
use crate::error::{Error, Result};
use crate::geom::{self, Vec2};

pub use export::{path_from_csv, path_from_json, path_from_record, path_to_csv, path_to_json, PathRecord, PathVertex};
pub use geodesic::{is_geodesic_path, is_geodesic_sequence, GeodesicCheck, VertexCheck, VertexTest};
pub use search::{local_distance, local_search, midpoint, Candidate, SearchResult, Walk, WalkStep};
pub use slice::{busemann_check, orth_slice, BusemannReport, LocalSlice, SlicePiece};

/// A straight piece of a broken line inside one face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub face: FaceId,
    pub from: Vec2,
    pub to: Vec2,
    pub length: f64,
}

/// A broken line x_0..x_n with each edge inside a stated face. Vertex `i < n`
/// is stored in the chart of edge `i`; the last vertex in the chart of the
/// last edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexPath {
    start: Point,
    segments: Vec<Segment>,
}

impl VertexPath {
    /// The constant path at `p`.
    pub fn point(p: Point) -> Self {
        Self { start: p, segments: Vec::new() }
    }

    /// Path from segments; consecutive segments must meet (not checked here).
    pub fn from_segments(start: Point, segments: Vec<Segment>) -> Self {
        Self { start, segments }
    }

    /// Broken line through `points`, each edge placed in the common face where
    /// it is shortest. Zero-length edges are dropped.
    pub fn from_points(complex: &Complex, points: &[Point]) -> Result<Self> {
        let first = *points.first().ok_or_else(|| Error::Input("empty path".into()))?;
        for p in points {
            complex.check_point(p)?;
        }
        let mut segments = Vec::with_capacity(points.len());
        for w in points.windows(2) {
            let (length, a, b) = complex.face_distance(&w[0], &w[1]).ok_or_else(|| {
                Error::Input(format!(
                    "consecutive vertices ({}, {:?}) and ({}, {:?}) share no face",
                    w[0].face, w[0].coords, w[1].face, w[1].coords
                ))
            })?;
            segments.push(Segment { face: a.face, from: a.coords, to: b.coords, length });
        }
        let mut p = Self { start: first, segments };
        p.normalize();
        Ok(p)
    }

    /// Drop zero-length edges.
    pub fn normalize(&mut self) {
        let total = self.length();
        let tiny = 1e-14 * (1.0 + total);
        self.segments.retain(|s| s.length > tiny);
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start(&self) -> Point {
        self.start
    }

    pub fn end(&self) -> Point {
        match self.segments.last() {
            Some(s) => Point::new(s.face, s.to),
            None => self.start,
        }
    }

    pub fn vertices(&self) -> Vec<Point> {
        if self.segments.is_empty() {
            return vec![self.start];
        }
        let mut v: Vec<Point> = self.segments.iter().map(|s| Point::new(s.face, s.from)).collect();
        v.push(self.end());
        v
    }

    pub fn edge_faces(&self) -> Vec<FaceId> {
        self.segments.iter().map(|s| s.face).collect()
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.length).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.segments.len()
    }

    /// L(s): total length.
    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// δ(s): longest edge.
    pub fn max_edge(&self) -> f64 {
        self.segments.iter().map(|s| s.length).fold(0.0, f64::max)
    }

    /// E(s): sum of squared edge lengths.
    pub fn energy(&self) -> f64 {
        self.segments.iter().map(|s| s.length * s.length).sum()
    }

    /// Point at arc-length fraction `t` in `[0, 1]`.
    pub fn at_fraction(&self, t: f64) -> Point {
        self.at_length(t.clamp(0.0, 1.0) * self.length())
    }

    /// Point at arc length `d` from the start.
    pub fn at_length(&self, d: f64) -> Point {
        let mut left = d.max(0.0);
        for s in &self.segments {
            if left <= s.length {
                let t = if s.length > 0.0 { left / s.length } else { 0.0 };
                return Point::new(s.face, geom::lerp(s.from, s.to, t));
            }
            left -= s.length;
        }
        self.end()
    }

    /// The same path traversed backwards.
    pub fn reversed(&self, complex: &Complex) -> Self {
        let segments: Vec<Segment> = self
            .segments
            .iter()
            .rev()
            .map(|s| Segment {
                face: s.face,
                from: s.to,
                to: s.from,
                length: complex.face(s.face).length(s.to, s.from),
            })
            .collect();
        Self { start: self.end(), segments }
    }

    /// Concatenate; `other` must start where `self` ends.
    pub fn join(mut self, other: &VertexPath) -> Self {
        self.segments.extend_from_slice(&other.segments);
        self
    }
}

/// E(s) >= L(s)^2 / n, with equality exactly for equal edges.
pub fn energy_gap(lengths: &[f64]) -> f64 {
    let n = lengths.len() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let l: f64 = lengths.iter().sum();
    let e: f64 = lengths.iter().map(|x| x * x).sum();
    e - l * l / n
}

/// True when all edge lengths agree to `rel` relative tolerance.
pub fn equal_edges(lengths: &[f64], rel: f64) -> bool {
    let (lo, hi) = lengths
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    lengths.is_empty() || hi - lo <= rel * hi
}
