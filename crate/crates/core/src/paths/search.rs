//! Local distances by enumerating face walks and solving each as a convex
//! program over its edge-crossing parameters.

use crate::complex::{Complex, FaceId, Link, Point};
use crate::config::SearchConfig;
use crate::error::{Error, Result};
use crate::geom::{self, Vec2};

use super::solver::{Problem, Term};
use super::{Segment, VertexPath};

/// How a walk passes from one face to the next.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkStep {
    /// Through edge `edge` of the current face, across `link`.
    Edge { edge: usize, link: Link },
    /// Through a vertex of the complex, at fixed chart points.
    Vertex { vertex: usize, from: Vec2, to: Vec2 },
}

/// A sequence of faces from a start point to an end point.
#[derive(Debug, Clone, PartialEq)]
pub struct Walk {
    pub faces: Vec<FaceId>,
    pub steps: Vec<WalkStep>,
    pub start: Vec2,
    pub end: Vec2,
}

impl Walk {
    pub(crate) fn problem<'a>(&self, complex: &'a Complex) -> Problem<'a> {
        let m = self.steps.len();
        let mut terms: Vec<Term<'a>> = self
            .faces
            .iter()
            .map(|&f| Term {
                norm: &complex.face(f).norm,
                a: [0.0; 2],
                b: [0.0; 2],
                c: [0.0; 2],
                d: [0.0; 2],
                prev: None,
                next: None,
            })
            .collect();
        terms[0].c = self.start;
        terms[m].a = self.end;
        let (mut lo, mut hi) = (Vec::new(), Vec::new());
        let mut scale = geom::len(self.start).max(geom::len(self.end));
        for (j, st) in self.steps.iter().enumerate() {
            match *st {
                WalkStep::Edge { edge, link } => {
                    let e = complex.face(self.faces[j]).edge(edge);
                    let v = lo.len();
                    lo.push(e.lo);
                    hi.push(e.hi);
                    terms[j].a = e.origin;
                    terms[j].b = e.dir;
                    terms[j].next = Some(v);
                    terms[j + 1].c = complex.map_across(&link, e.origin);
                    terms[j + 1].d = geom::mat_vec(&complex.link_matrix(&link), e.dir);
                    terms[j + 1].prev = Some(v);
                    scale = scale.max(geom::len(e.origin));
                }
                WalkStep::Vertex { from, to, .. } => {
                    terms[j].a = from;
                    terms[j + 1].c = to;
                    scale = scale.max(geom::len(from));
                }
            }
        }
        Problem { terms, lo, hi, scale: 1.0 + scale }
    }

    /// Start by projecting forward from the start point.
    pub(crate) fn initial(&self, complex: &Complex) -> Vec<f64> {
        let mut cur = self.start;
        let mut s = Vec::new();
        for (j, st) in self.steps.iter().enumerate() {
            match *st {
                WalkStep::Edge { edge, link } => {
                    let e = complex.face(self.faces[j]).edge(edge);
                    let t = e.clamp(e.param(cur));
                    s.push(t);
                    cur = complex.map_across(&link, e.point(t));
                }
                WalkStep::Vertex { to, .. } => cur = to,
            }
        }
        s
    }

    /// A start with every crossing strictly inside its edge: midpoints of
    /// finite edges, and on rays the mean distance of the walk's ends from
    /// the ray's corner.
    pub(crate) fn interior_initial(&self, complex: &Complex) -> Vec<f64> {
        let mut s = Vec::new();
        let mut cur = self.start;
        for (j, st) in self.steps.iter().enumerate() {
            match *st {
                WalkStep::Edge { edge, link } => {
                    let e = complex.face(self.faces[j]).edge(edge);
                    let t = match (e.lo.is_finite(), e.hi.is_finite()) {
                        (true, true) => 0.5 * (e.lo + e.hi),
                        (true, false) | (false, true) => {
                            let anchor = if e.lo.is_finite() { e.lo } else { e.hi };
                            let corner = e.point(anchor);
                            let r = 0.5 * (geom::dist(self.start, corner) + geom::dist(self.end, corner)).max(1e-9);
                            if e.lo.is_finite() { e.lo + r } else { e.hi - r }
                        }
                        (false, false) => e.param(cur),
                    };
                    s.push(t);
                    cur = complex.map_across(&link, e.point(t));
                }
                WalkStep::Vertex { to, .. } => cur = to,
            }
        }
        s
    }

    /// Some crossing sits at an end of its edge.
    pub(crate) fn touches_corner(&self, complex: &Complex, s: &[f64]) -> bool {
        let mut k = 0;
        for (j, st) in self.steps.iter().enumerate() {
            if let WalkStep::Edge { edge, .. } = *st {
                let e = complex.face(self.faces[j]).edge(edge);
                if s[k] == e.lo || s[k] == e.hi {
                    return true;
                }
                k += 1;
            }
        }
        false
    }

    pub(crate) fn path(&self, problem: &Problem, s: &[f64]) -> VertexPath {
        let segments = problem
            .terms
            .iter()
            .zip(&self.faces)
            .map(|(t, &face)| {
                let (from, to) = (t.entry(s), t.exit(s));
                Segment { face, from, to, length: t.norm.value(&geom::sub(to, from)) }
            })
            .collect();
        let mut p = VertexPath::from_segments(Point::new(self.faces[0], self.start), segments);
        p.normalize();
        p
    }
}

/// A locally optimal path for one walk.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub length: f64,
    pub path: VertexPath,
    pub walk: Walk,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Distinct optima, shortest first.
    pub candidates: Vec<Candidate>,
    /// Two distinct paths attain the minimum within the tie tolerance.
    pub tie: bool,
    pub solved: usize,
    pub truncated: bool,
}

impl SearchResult {
    pub fn length(&self) -> f64 {
        self.candidates[0].length
    }

    pub fn path(&self) -> &VertexPath {
        &self.candidates[0].path
    }
}

#[derive(Clone)]
enum Entry {
    At(Vec2),
    Edge(usize),
}

#[derive(Clone)]
struct State {
    faces: Vec<FaceId>,
    steps: Vec<WalkStep>,
    used_vertices: Vec<usize>,
    entry: Entry,
    came_by: Option<Link>,
    lb: f64,
}

fn point_segment(x: Vec2, e: &crate::complex::Edge) -> f64 {
    geom::dist(x, e.project(x))
}

fn segment_segment(a: &crate::complex::Edge, b: &crate::complex::Edge) -> f64 {
    let c = geom::cross(a.dir, b.dir);
    if c.abs() > 1e-14 {
        let w = geom::sub(b.origin, a.origin);
        let s = geom::cross(w, b.dir) / c;
        let t = geom::cross(w, a.dir) / c;
        if s >= a.lo && s <= a.hi && t >= b.lo && t <= b.hi {
            return 0.0;
        }
    }
    let mut best = f64::INFINITY;
    for s in [a.lo, a.hi] {
        if s.is_finite() {
            best = best.min(point_segment(a.point(s), b));
        }
    }
    for t in [b.lo, b.hi] {
        if t.is_finite() {
            best = best.min(point_segment(b.point(t), a));
        }
    }
    if best.is_infinite() {
        // Two full lines.
        best = if c.abs() > 1e-14 { 0.0 } else { geom::cross(geom::sub(b.origin, a.origin), a.dir).abs() };
    }
    best
}

fn entry_distance(complex: &Complex, face: FaceId, entry: &Entry, x: Vec2) -> f64 {
    let f = complex.face(face);
    match entry {
        Entry::At(p) => geom::dist(*p, x),
        Entry::Edge(e) => point_segment(x, f.edge(*e)),
    }
}

fn entry_edge_distance(complex: &Complex, face: FaceId, entry: &Entry, edge: usize) -> f64 {
    let f = complex.face(face);
    match entry {
        Entry::At(p) => point_segment(*p, f.edge(edge)),
        Entry::Edge(e) => segment_segment(f.edge(*e), f.edge(edge)),
    }
}

fn shares_edge_through(complex: &Complex, f: FaceId, ci: usize, g: FaceId, cj: usize) -> bool {
    let cf = complex.face(f).corners()[ci];
    let cg = complex.face(g).corners()[cj];
    cf.edges.iter().any(|&e| {
        complex
            .links(f, e)
            .iter()
            .any(|l| l.face == g && cg.edges.contains(&l.edge))
    })
}

/// Enumerate face walks from `a` to `b` and solve each; keep distinct optima
/// whose length is within `window` (relative) of the best.
pub fn local_search(complex: &Complex, a: &Point, b: &Point, cfg: &SearchConfig, window: f64) -> Result<SearchResult> {
    complex.check_point(a)?;
    complex.check_point(b)?;
    let ra = complex.representations(a);
    let rb = complex.representations(b);
    let mut found: Vec<Candidate> = Vec::new();
    let mut best = f64::INFINITY;
    let mut solved = 0usize;
    let mut truncated = false;
    let slack = |best: f64| best * (1.0 + window) + 1e-12 * (1.0 + best);

    let mut level: Vec<State> = ra
        .iter()
        .map(|r| State {
            faces: vec![r.face],
            steps: Vec::new(),
            used_vertices: Vec::new(),
            entry: Entry::At(r.coords),
            came_by: None,
            lb: 0.0,
        })
        .collect();
    let start_of = |face: FaceId| ra.iter().find(|r| r.face == face).map(|r| r.coords);

    for depth in 1..=cfg.max_faces.max(1) {
        let mut next = Vec::new();
        for st in &level {
            let face = *st.faces.last().expect("nonempty walk");
            let floor = complex.face(face).norm_floor();
            for r in rb.iter().filter(|r| r.face == face) {
                let lb = st.lb + floor * entry_distance(complex, face, &st.entry, r.coords);
                if lb > slack(best) {
                    continue;
                }
                if solved >= cfg.max_sequences {
                    truncated = true;
                    continue;
                }
                let walk = Walk {
                    faces: st.faces.clone(),
                    steps: st.steps.clone(),
                    start: start_of(st.faces[0]).expect("walk starts at a representation"),
                    end: r.coords,
                };
                let problem = walk.problem(complex);
                let start = walk.initial(complex);
                let (mut params, mut length) = problem.solve(&start);
                if walk.touches_corner(complex, &start) || walk.touches_corner(complex, &params) {
                    let (p2, l2) = problem.solve(&walk.interior_initial(complex));
                    if l2 < length {
                        (params, length) = (p2, l2);
                    }
                }
                solved += 1;
                best = best.min(length);
                let path = walk.path(&problem, &params);
                found.push(Candidate { length, path, walk, params });
            }
            if depth == cfg.max_faces {
                continue;
            }
            let count = |g: FaceId| st.faces.iter().filter(|&&x| x == g).count();
            let f = complex.face(face);
            for e in 0..f.edges().len() {
                let lb = st.lb + floor * entry_edge_distance(complex, face, &st.entry, e);
                if lb > slack(best) {
                    continue;
                }
                for link in complex.links(face, e) {
                    if let Some(prev) = st.came_by {
                        if prev.gluing == link.gluing && prev.forward != link.forward {
                            continue;
                        }
                    }
                    if count(link.face) >= cfg.max_face_repeats {
                        continue;
                    }
                    let mut s = st.clone();
                    s.faces.push(link.face);
                    s.steps.push(WalkStep::Edge { edge: e, link: *link });
                    s.entry = Entry::Edge(link.edge);
                    s.came_by = Some(*link);
                    s.lb = lb;
                    next.push(s);
                }
            }
            for (ci, corner) in f.corners().iter().enumerate() {
                let v = complex.vertex_of(face, ci);
                if st.used_vertices.contains(&v) {
                    continue;
                }
                let lb = st.lb + floor * entry_distance(complex, face, &st.entry, corner.at);
                if lb > slack(best) {
                    continue;
                }
                for &(g, cj) in &complex.vertices()[v] {
                    if g == face || count(g) >= cfg.max_face_repeats || shares_edge_through(complex, face, ci, g, cj) {
                        continue;
                    }
                    let to = complex.face(g).corners()[cj].at;
                    let mut s = st.clone();
                    s.faces.push(g);
                    s.steps.push(WalkStep::Vertex { vertex: v, from: corner.at, to });
                    s.used_vertices.push(v);
                    s.entry = Entry::At(to);
                    s.came_by = None;
                    s.lb = lb;
                    next.push(s);
                }
            }
        }
        level = next;
        if level.is_empty() {
            break;
        }
    }
    if found.is_empty() {
        return Err(Error::OutOfRange);
    }
    found.sort_by(|x, y| x.length.total_cmp(&y.length));
    let cutoff = slack(found[0].length);
    let mut distinct: Vec<Candidate> = Vec::new();
    for c in found.into_iter().take_while(|c| c.length <= cutoff) {
        if !distinct.iter().any(|d| same_path(complex, &d.path, &c.path, cfg.dedup_distance)) {
            distinct.push(c);
        }
    }
    let l0 = distinct[0].length;
    // Lengths equal to within ε only separate paths more than about √ε·L apart.
    let apart = cfg.dedup_distance.max(cfg.tie_tolerance.sqrt() * l0);
    let tie = distinct[1..].iter().any(|c| {
        c.length <= l0 + cfg.tie_tolerance * l0.max(1e-300) && !same_path(complex, &distinct[0].path, &c.path, apart)
    });
    Ok(SearchResult { candidates: distinct, tie, solved, truncated })
}

/// Two paths are the same when their arc-length samples coincide.
pub(crate) fn same_path(complex: &Complex, p: &VertexPath, q: &VertexPath, tol: f64) -> bool {
    let (lp, lq) = (p.length(), q.length());
    if (lp - lq).abs() > 1e-7 * (1.0 + lp.max(lq)) {
        return false;
    }
    (1..8).all(|k| {
        let t = k as f64 / 8.0;
        complex.same_point(&p.at_fraction(t), &q.at_fraction(t), tol)
    })
}

/// Length of the shortest local path and the path itself.
pub fn local_distance(complex: &Complex, a: &Point, b: &Point, cfg: &SearchConfig) -> Result<(f64, VertexPath)> {
    let r = local_search(complex, a, b, cfg, cfg.tie_tolerance)?;
    Ok((r.length(), r.candidates[0].path.clone()))
}

/// The point halfway along the shortest path, in canonical form.
pub fn midpoint(complex: &Complex, a: &Point, b: &Point, cfg: &SearchConfig) -> Result<Point> {
    let r = local_search(complex, a, b, cfg, cfg.tie_tolerance)?;
    if r.tie {
        return Err(Error::NonUniqueMidpoint(format!(
            "two distinct shortest paths of length {} and {} between ({}, {:?}) and ({}, {:?})",
            r.candidates[0].length, r.candidates[1].length, a.face, a.coords, b.face, b.coords
        )));
    }
    Ok(complex.canonical(&r.path().at_fraction(0.5)))
}
