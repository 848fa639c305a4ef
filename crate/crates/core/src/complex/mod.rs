//! Finsler PL complexes: convex polygons in 2D charts, each with a norm, glued
//! along edges by affine maps.

mod cone;
mod json;
mod periodic;
mod validate;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geom::{self, Vec2};
use crate::norms::Norm;

pub use cone::{Cone, Star, TangentCone};
pub use json::{ComplexSpec, FaceSpec};
pub use periodic::PeriodicComplex;
pub use validate::{Issue, IssueKind, ValidationReport};

pub type FaceId = usize;

/// The constraint `normal . x <= offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub normal: Vec2,
    pub offset: f64,
}

/// Edge line of a face, traversed counterclockwise. Points are `origin + s * dir`
/// for `s` in `[lo, hi]`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Unit outward normal.
    pub normal: Vec2,
    /// Offset for the unit normal.
    pub offset: f64,
    pub origin: Vec2,
    /// Unit direction, `perp(normal)`.
    pub dir: Vec2,
    pub lo: f64,
    pub hi: f64,
}

impl Edge {
    pub fn point(&self, s: f64) -> Vec2 {
        geom::axpy(self.origin, s, self.dir)
    }

    pub fn param(&self, x: Vec2) -> f64 {
        geom::dot(geom::sub(x, self.origin), self.dir)
    }

    /// Signed distance from the edge line, positive outside.
    pub fn excess(&self, x: Vec2) -> f64 {
        geom::dot(self.normal, x) - self.offset
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Clamp a parameter into the edge extent.
    pub fn clamp(&self, s: f64) -> f64 {
        s.clamp(self.lo, self.hi)
    }

    /// Nearest point of the edge segment.
    pub fn project(&self, x: Vec2) -> Vec2 {
        self.point(self.clamp(self.param(x)))
    }
}

/// A polygon corner: the common endpoint of two edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corner {
    pub at: Vec2,
    pub edges: [usize; 2],
}

/// A convex, possibly unbounded, polygon in its own chart with a norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub id: FaceId,
    pub norm: Norm,
    constraints: Vec<HalfPlane>,
    declared_unbounded: bool,
    edges: Vec<Edge>,
    corners: Vec<Corner>,
    interior: Vec2,
    inradius_hint: f64,
    norm_floor: f64,
}

impl Face {
    /// Build a face from half-plane constraints. Every constraint must contribute
    /// an edge of positive length and the face must have nonempty interior.
    pub fn new(id: FaceId, constraints: Vec<HalfPlane>, norm: Norm, unbounded: bool) -> Result<Self> {
        if norm.dim() != 2 {
            return Err(Error::Input(format!("face {id}: chart norm must be 2-dimensional, got {}", norm.dim())));
        }
        let mut edges = Vec::with_capacity(constraints.len());
        for (i, h) in constraints.iter().enumerate() {
            let l = geom::len(h.normal);
            if !(l > 0.0) || !l.is_finite() || !h.offset.is_finite() {
                return Err(Error::Input(format!("face {id}: constraint {i} has a zero or invalid normal")));
            }
            let normal = geom::scale(h.normal, 1.0 / l);
            let offset = h.offset / l;
            edges.push(Edge {
                normal,
                offset,
                origin: geom::scale(normal, offset),
                dir: geom::perp(normal),
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            });
        }
        let scale = 1.0 + edges.iter().fold(0.0f64, |a, e| a.max(e.offset.abs()));
        let eps = 1e-12 * scale;
        for i in 0..edges.len() {
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for (j, other) in edges.iter().enumerate() {
                if i == j {
                    continue;
                }
                let a = geom::dot(other.normal, edges[i].dir);
                let b = other.offset - geom::dot(other.normal, edges[i].origin);
                if a > 1e-14 {
                    hi = hi.min(b / a);
                } else if a < -1e-14 {
                    lo = lo.max(b / a);
                } else if b < -eps {
                    hi = f64::NEG_INFINITY;
                }
            }
            if !(hi - lo > 1e-9 * scale) {
                return Err(Error::Input(format!("face {id}: constraint {i} is redundant or the face is degenerate")));
            }
            edges[i].lo = lo;
            edges[i].hi = hi;
        }
        let mut corners: Vec<Corner> = Vec::new();
        for (i, e) in edges.iter().enumerate() {
            for s in [e.lo, e.hi] {
                if !s.is_finite() {
                    continue;
                }
                let at = e.point(s);
                if let Some(c) = corners.iter_mut().find(|c| geom::dist(c.at, at) <= 1e-9 * scale) {
                    if c.edges[0] != i {
                        c.edges[1] = i;
                    }
                } else {
                    corners.push(Corner { at, edges: [i, i] });
                }
            }
        }
        let (interior, inradius_hint) = interior_point(&edges)
            .ok_or_else(|| Error::Input(format!("face {id}: empty interior")))?;
        let norm_floor = 0.9
            * (0..256)
                .map(|k| {
                    let a = std::f64::consts::TAU * k as f64 / 256.0;
                    norm.value(&[a.cos(), a.sin()])
                })
                .fold(f64::INFINITY, f64::min);
        Ok(Self {
            id,
            norm,
            constraints,
            norm_floor,
            declared_unbounded: unbounded,
            edges,
            corners,
            interior,
            inradius_hint,
        })
    }

    /// Face from a counterclockwise vertex list.
    pub fn polygon(id: FaceId, vertices: &[Vec2], norm: Norm) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Input(format!("face {id}: a polygon needs at least 3 vertices")));
        }
        let n = vertices.len();
        let mut area = 0.0;
        let mut hs = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            area += geom::cross(a, b);
            let d = geom::sub(b, a);
            let normal = [d[1], -d[0]];
            hs.push(HalfPlane { normal, offset: geom::dot(normal, a) });
        }
        if !(area > 0.0) {
            return Err(Error::Input(format!("face {id}: vertices must be counterclockwise")));
        }
        Self::new(id, hs, norm, false)
    }

    /// Cone `{a r1 + b r2 : a, b >= 0}` with apex at the origin; the angle must be below pi.
    pub fn cone(id: FaceId, r1: Vec2, r2: Vec2, norm: Norm) -> Result<Self> {
        if !(geom::cross(r1, r2) > 1e-12 * geom::len(r1) * geom::len(r2)) {
            return Err(Error::Input(format!("face {id}: cone rays must turn counterclockwise by less than pi")));
        }
        let hs = vec![
            HalfPlane { normal: [r1[1], -r1[0]], offset: 0.0 },
            HalfPlane { normal: [-r2[1], r2[0]], offset: 0.0 },
        ];
        Self::new(id, hs, norm, true)
    }

    pub fn constraints(&self) -> &[HalfPlane] {
        &self.constraints
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    /// A point with positive slack in every constraint.
    pub fn interior(&self) -> Vec2 {
        self.interior
    }

    pub fn is_bounded(&self) -> bool {
        !self.edges.is_empty() && self.edges.iter().all(Edge::is_finite)
    }

    pub fn declared_unbounded(&self) -> bool {
        self.declared_unbounded
    }

    /// A constant c with `norm(v) >= c |v|` for chart vectors.
    pub fn norm_floor(&self) -> f64 {
        self.norm_floor
    }

    /// Slack of the interior point: a chart radius of a disc inside the face.
    pub fn inradius_hint(&self) -> f64 {
        self.inradius_hint
    }

    /// Largest constraint violation; nonpositive inside.
    pub fn excess(&self, x: Vec2) -> f64 {
        self.edges.iter().map(|e| e.excess(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: Vec2, tol: f64) -> bool {
        self.edges.is_empty() || self.excess(x) <= tol * (1.0 + x[0].abs().max(x[1].abs()))
    }

    /// Chart distance from an inside point to the boundary.
    pub fn boundary_distance(&self, x: Vec2) -> f64 {
        self.edges.iter().map(|e| -e.excess(x)).fold(f64::INFINITY, f64::min)
    }

    /// Edges whose closed segment contains `x` within `tol`.
    pub fn edges_at(&self, x: Vec2, tol: f64) -> Vec<usize> {
        let t = tol * (1.0 + x[0].abs().max(x[1].abs()));
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                let s = e.param(x);
                e.excess(x).abs() <= t && s >= e.lo - t && s <= e.hi + t
            })
            .map(|(i, _)| i)
            .collect()
    }

    pub fn corner_at(&self, x: Vec2, tol: f64) -> Option<usize> {
        let t = tol * (1.0 + x[0].abs().max(x[1].abs()));
        self.corners.iter().position(|c| geom::dist(c.at, x) <= t)
    }

    /// Norm length of the chart segment from `a` to `b`.
    pub fn length(&self, a: Vec2, b: Vec2) -> f64 {
        self.norm.value(&geom::sub(b, a))
    }
}

fn interior_point(edges: &[Edge]) -> Option<(Vec2, f64)> {
    let Some(e0) = edges.first() else {
        return Some(([0.0, 0.0], f64::INFINITY));
    };
    let s = match (e0.lo.is_finite(), e0.hi.is_finite()) {
        (true, true) => 0.5 * (e0.lo + e0.hi),
        (true, false) => e0.lo + 1.0,
        (false, true) => e0.hi - 1.0,
        (false, false) => 0.0,
    };
    let m = e0.point(s);
    let inward = geom::scale(e0.normal, -1.0);
    let mut tmax = f64::INFINITY;
    for e in &edges[1..] {
        let a = geom::dot(e.normal, inward);
        if a > 1e-14 {
            tmax = tmax.min(-e.excess(m) / a);
        }
    }
    if !(tmax > 1e-12) {
        return None;
    }
    let t = if tmax.is_finite() { 0.5 * tmax } else { 1.0 };
    let x = geom::axpy(m, t, inward);
    let slack = edges.iter().map(|e| -e.excess(x)).fold(f64::INFINITY, f64::min);
    (slack > 0.0).then_some((x, slack))
}

/// Affine identification of edge `sub_a` of `face_a` with edge `sub_b` of
/// `face_b`: chart A point `x` corresponds to `matrix * x + offset` in chart B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Gluing {
    pub face_a: FaceId,
    pub sub_a: usize,
    pub face_b: FaceId,
    pub sub_b: usize,
    /// Row-major 2x2 linear part.
    pub matrix: [f64; 4],
    pub offset: Vec2,
}

impl Gluing {
    pub fn identity(face_a: FaceId, sub_a: usize, face_b: FaceId, sub_b: usize) -> Self {
        Self {
            face_a,
            sub_a,
            face_b,
            sub_b,
            matrix: [1.0, 0.0, 0.0, 1.0],
            offset: [0.0, 0.0],
        }
    }

    pub fn apply(&self, x: Vec2) -> Vec2 {
        geom::add(geom::mat_vec(&self.matrix, x), self.offset)
    }
}

/// One way of leaving a face through an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub gluing: usize,
    /// True when crossing from side A to side B.
    pub forward: bool,
    pub face: FaceId,
    pub edge: usize,
}

/// A point given by a face and chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub face: FaceId,
    pub coords: Vec2,
}

impl Point {
    pub fn new(face: FaceId, coords: Vec2) -> Self {
        Self { face, coords }
    }
}

/// A Finsler PL complex. Immutable once built.
#[derive(Debug, Clone)]
pub struct Complex {
    faces: Vec<Face>,
    gluings: Vec<Gluing>,
    inverses: Vec<[f64; 4]>,
    links: Vec<Vec<Vec<Link>>>,
    vertex_of: Vec<Vec<usize>>,
    vertices: Vec<Vec<(FaceId, usize)>>,
    tol: Tolerances,
}

impl Complex {
    pub fn new(faces: Vec<Face>, gluings: Vec<Gluing>) -> Result<Self> {
        Self::with_tolerances(faces, gluings, Tolerances::default())
    }

    pub fn with_tolerances(faces: Vec<Face>, gluings: Vec<Gluing>, tol: Tolerances) -> Result<Self> {
        for (i, f) in faces.iter().enumerate() {
            if f.id != i {
                return Err(Error::Input(format!("face ids must be 0..n in order; found {} at position {i}", f.id)));
            }
        }
        let mut links: Vec<Vec<Vec<Link>>> = faces.iter().map(|f| vec![Vec::new(); f.edges.len()]).collect();
        let mut inverses = Vec::with_capacity(gluings.len());
        for (gi, g) in gluings.iter().enumerate() {
            for (f, e) in [(g.face_a, g.sub_a), (g.face_b, g.sub_b)] {
                if f >= faces.len() || e >= faces[f].edges.len() {
                    return Err(Error::Input(format!("gluing {gi} refers to a missing face or edge ({f}, {e})")));
                }
            }
            let inv = geom::inverse(&g.matrix)
                .ok_or_else(|| Error::Input(format!("gluing {gi} has a singular matrix")))?;
            inverses.push(inv);
            links[g.face_a][g.sub_a].push(Link { gluing: gi, forward: true, face: g.face_b, edge: g.sub_b });
            links[g.face_b][g.sub_b].push(Link { gluing: gi, forward: false, face: g.face_a, edge: g.sub_a });
        }
        let mut c = Self {
            faces,
            gluings,
            inverses,
            links,
            vertex_of: Vec::new(),
            vertices: Vec::new(),
            tol,
        };
        c.build_vertices();
        Ok(c)
    }

    /// Build and require a clean validation report.
    pub fn validated(faces: Vec<Face>, gluings: Vec<Gluing>) -> Result<Self> {
        let c = Self::new(faces, gluings)?;
        let report = c.validate();
        if !report.valid {
            return Err(Error::Validation(report.summary()));
        }
        Ok(c)
    }

    fn build_vertices(&mut self) {
        let mut ids: Vec<Vec<usize>> = Vec::new();
        let mut parent = Vec::new();
        for f in &self.faces {
            ids.push((parent.len()..parent.len() + f.corners.len()).collect());
            parent.extend(parent.len()..parent.len() + f.corners.len());
        }
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for f in &self.faces {
            for (ci, c) in f.corners.iter().enumerate() {
                for &e in &c.edges {
                    for link in &self.links[f.id][e] {
                        let y = self.map_across(link, c.at);
                        if let Some(cj) = self.faces[link.face].corner_at(y, 1e-7) {
                            let (a, b) = (find(&mut parent, ids[f.id][ci]), find(&mut parent, ids[link.face][cj]));
                            parent[a] = b;
                        }
                    }
                }
            }
        }
        let mut class_of_root = std::collections::HashMap::new();
        let mut vertices: Vec<Vec<(FaceId, usize)>> = Vec::new();
        let mut vertex_of = Vec::new();
        for f in &self.faces {
            let mut row = Vec::with_capacity(f.corners.len());
            for ci in 0..f.corners.len() {
                let r = find(&mut parent, ids[f.id][ci]);
                let v = *class_of_root.entry(r).or_insert_with(|| {
                    vertices.push(Vec::new());
                    vertices.len() - 1
                });
                vertices[v].push((f.id, ci));
                row.push(v);
            }
            vertex_of.push(row);
        }
        self.vertex_of = vertex_of;
        self.vertices = vertices;
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: FaceId) -> &Face {
        &self.faces[id]
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Ways of crossing edge `edge` of face `face`.
    pub fn links(&self, face: FaceId, edge: usize) -> &[Link] {
        &self.links[face][edge]
    }

    /// Vertex classes, each a list of (face, corner index).
    pub fn vertices(&self) -> &[Vec<(FaceId, usize)>] {
        &self.vertices
    }

    pub fn vertex_of(&self, face: FaceId, corner: usize) -> usize {
        self.vertex_of[face][corner]
    }

    /// Carry chart coordinates of an edge point across a link.
    pub fn map_across(&self, link: &Link, x: Vec2) -> Vec2 {
        let g = &self.gluings[link.gluing];
        if link.forward {
            g.apply(x)
        } else {
            geom::mat_vec(&self.inverses[link.gluing], geom::sub(x, g.offset))
        }
    }

    /// Linear part of the chart change across a link.
    pub fn link_matrix(&self, link: &Link) -> [f64; 4] {
        if link.forward {
            self.gluings[link.gluing].matrix
        } else {
            self.inverses[link.gluing]
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.faces.iter().all(|f| f.norm.is_smooth())
    }

    /// Check that `p` names an existing face and lies in it.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        let f = self.faces.get(p.face).ok_or(Error::Incidence { face: p.face })?;
        if !p.coords[0].is_finite() || !p.coords[1].is_finite() {
            return Err(Error::Input("point coordinates must be finite".into()));
        }
        if !f.contains(p.coords, self.tol.containment) {
            return Err(Error::Input(format!(
                "point ({}, {}) is outside face {}",
                p.coords[0], p.coords[1], p.face
            )));
        }
        Ok(())
    }

    /// Every (face, coordinates) representation of the quotient point of `p`.
    pub fn representations(&self, p: &Point) -> Vec<Point> {
        self.closure(p).0
    }

    /// Representations plus the largest mismatch seen when a chart change lands
    /// next to, but not exactly on, an already known representation.
    pub(crate) fn closure(&self, p: &Point) -> (Vec<Point>, f64) {
        let tol = self.tol.containment.max(1e-9);
        let mut out = vec![*p];
        let mut defect = 0.0f64;
        let mut i = 0;
        while i < out.len() {
            let q = out[i];
            i += 1;
            for e in self.faces[q.face].edges_at(q.coords, tol) {
                for link in &self.links[q.face][e] {
                    let y = self.map_across(link, q.coords);
                    let scale = 1.0 + y[0].abs().max(y[1].abs());
                    let near = out
                        .iter()
                        .filter(|r| r.face == link.face)
                        .map(|r| geom::dist(r.coords, y))
                        .fold(f64::INFINITY, f64::min);
                    if near <= 1e-7 * scale {
                        defect = defect.max(near / scale);
                    } else if out.len() >= 4 * self.faces.len() + 16 {
                        // Runaway orbit: chart changes do not close up.
                        return (out, f64::INFINITY);
                    } else {
                        out.push(Point::new(link.face, y));
                    }
                }
            }
        }
        (out, defect)
    }

    /// Representation in the lowest face id (ties broken by coordinates).
    pub fn canonical(&self, p: &Point) -> Point {
        let mut reps = self.representations(p);
        reps.sort_by(|a, b| {
            a.face
                .cmp(&b.face)
                .then(a.coords[0].total_cmp(&b.coords[0]))
                .then(a.coords[1].total_cmp(&b.coords[1]))
        });
        reps[0]
    }

    /// Same point expressed in the chart of `target`.
    pub fn transition(&self, p: &Point, target: FaceId) -> Result<Point> {
        if target >= self.faces.len() {
            return Err(Error::Incidence { face: target });
        }
        self.representations(p)
            .into_iter()
            .find(|r| r.face == target)
            .ok_or(Error::Incidence { face: target })
    }

    /// True when both points are the same point of the quotient.
    pub fn same_point(&self, a: &Point, b: &Point, tol: f64) -> bool {
        self.representations(a)
            .iter()
            .any(|r| r.face == b.face && geom::dist(r.coords, b.coords) <= tol)
    }

    /// Faces containing the point, as representations.
    pub fn incident(&self, p: &Point) -> Vec<Point> {
        self.representations(p)
    }

    /// Distance between two points of a common face, or `None` without one.
    pub fn face_distance(&self, a: &Point, b: &Point) -> Option<(f64, Point, Point)> {
        let ra = self.representations(a);
        let rb = self.representations(b);
        let mut best: Option<(f64, Point, Point)> = None;
        for x in &ra {
            for y in rb.iter().filter(|y| y.face == x.face) {
                let d = self.faces[x.face].length(x.coords, y.coords);
                if best.map_or(true, |b| d < b.0) {
                    best = Some((d, *x, *y));
                }
            }
        }
        best
    }
}
