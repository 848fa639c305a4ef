use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, FaceId, Point};
use crate::error::{Error, Result};
use crate::geom::{self, Vec2};

/// Bounded part of a complex: the same chart box in each listed face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    /// Faces taking part; all faces when absent.
    #[serde(default)]
    pub faces: Option<Vec<FaceId>>,
    /// `[xmin, ymin, xmax, ymax]` in every chart.
    pub bbox: [f64; 4],
}

impl Region {
    pub fn new(bbox: [f64; 4]) -> Self {
        Self { faces: None, bbox }
    }

    pub fn faces(&self, complex: &Complex) -> Vec<FaceId> {
        match &self.faces {
            Some(f) => f.clone(),
            None => (0..complex.faces().len()).collect(),
        }
    }

    fn check(&self) -> Result<()> {
        let [x0, y0, x1, y1] = self.bbox;
        if !self.bbox.iter().all(|v| v.is_finite()) || x1 < x0 || y1 < y0 {
            return Err(Error::Input("region must be a finite box".into()));
        }
        Ok(())
    }

    fn inside(&self, x: Vec2) -> bool {
        let [x0, y0, x1, y1] = self.bbox;
        x[0] >= x0 && x[0] <= x1 && x[1] >= y0 && x[1] <= y1
    }

    /// A random point of the region.
    pub fn sample(&self, complex: &Complex, rng: &mut ChaCha8Rng) -> Result<Point> {
        self.check()?;
        let faces = self.faces(complex);
        let [x0, y0, x1, y1] = self.bbox;
        for _ in 0..4096 {
            let f = faces[rng.gen_range(0..faces.len())];
            let x = [x0 + (x1 - x0) * rng.gen::<f64>(), y0 + (y1 - y0) * rng.gen::<f64>()];
            if complex.face(f).contains(x, 0.0) {
                return Ok(Point::new(f, x));
            }
        }
        Err(Error::Input("region does not meet its faces".into()))
    }
}

/// Lattice nodes in every face chart plus nodes along edges, joined within
/// each face up to a hop radius with exact norm weights.
#[derive(Debug, Clone)]
pub struct DiscretizationGraph {
    pub h: f64,
    pub hop_radius: f64,
    pub region: Region,
    /// Canonical point of each node.
    nodes: Vec<Point>,
    /// Representations of each node, indices into `members`.
    reps: Vec<Vec<(FaceId, u32)>>,
    /// Per face: node ids and chart coordinates.
    members: Vec<Vec<(u32, Vec2)>>,
    grids: Vec<HashMap<(i64, i64), Vec<u32>>>,
    index: HashMap<(FaceId, i64, i64), u32>,
}

fn key(p: &Point) -> (FaceId, i64, i64) {
    let q = |v: f64| (v * 1e9).round() as i64;
    (p.face, q(p.coords[0]), q(p.coords[1]))
}

/// Lattice and edge sample points of one face.
fn face_samples(complex: &Complex, region: &Region, face: FaceId, h: f64) -> Vec<Vec2> {
    let f = complex.face(face);
    let [x0, y0, x1, y1] = region.bbox;
    let mut out = Vec::new();
    let (i0, i1) = ((x0 / h).ceil() as i64, (x1 / h).floor() as i64);
    let (j0, j1) = ((y0 / h).ceil() as i64, (y1 / h).floor() as i64);
    for i in i0..=i1 {
        for j in j0..=j1 {
            let x = [i as f64 * h, j as f64 * h];
            if f.contains(x, 1e-12) {
                out.push(x);
            }
        }
    }
    for e in f.edges() {
        // Edge parameters on the lattice k * h, clipped to the box.
        let (mut lo, mut hi) = (e.lo, e.hi);
        for (k, (a, b)) in [(x0, x1), (y0, y1)].into_iter().enumerate() {
            let o = e.origin[k];
            let d = e.dir[k];
            if d.abs() < 1e-15 {
                if o < a || o > b {
                    hi = lo - 1.0;
                }
                continue;
            }
            let (ta, tb) = ((a - o) / d, (b - o) / d);
            lo = lo.max(ta.min(tb));
            hi = hi.min(ta.max(tb));
        }
        if hi < lo {
            continue;
        }
        let (k0, k1) = ((lo / h).ceil() as i64, (hi / h).floor() as i64);
        for k in k0..=k1 {
            out.push(e.point(k as f64 * h));
        }
        for t in [e.lo, e.hi] {
            if t.is_finite() && region.inside(e.point(t)) {
                out.push(e.point(t));
            }
        }
    }
    out
}

impl DiscretizationGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    /// Nodes lying in a face, with chart coordinates.
    pub fn face_nodes(&self, face: FaceId) -> &[(u32, Vec2)] {
        &self.members[face]
    }

    pub fn node_of(&self, p: &Point) -> Option<usize> {
        self.index.get(&key(p)).map(|&i| i as usize)
    }

    fn cell(&self, x: Vec2) -> (i64, i64) {
        ((x[0] / self.hop_radius).floor() as i64, (x[1] / self.hop_radius).floor() as i64)
    }

    fn neighbors(&self, face: FaceId, x: Vec2, mut f: impl FnMut(u32, Vec2)) {
        let (cx, cy) = self.cell(x);
        let r2 = self.hop_radius * self.hop_radius * (1.0 + 1e-12);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = self.grids[face].get(&(cx + dx, cy + dy)) {
                    for &m in list {
                        let (id, y) = self.members[face][m as usize];
                        let d = geom::sub(y, x);
                        if geom::dot(d, d) <= r2 {
                            f(id, y);
                        }
                    }
                }
            }
        }
    }

    /// Number of directed edges, counted by enumeration.
    pub fn edge_count(&self) -> usize {
        let mut n = 0;
        for (face, list) in self.members.iter().enumerate() {
            for &(id, x) in list {
                self.neighbors(face, x, |j, _| n += usize::from(j != id));
            }
        }
        n
    }
}

/// Build the lattice graph of a bounded region.
pub fn build_graph(complex: &Complex, region: &Region, h: f64, hop_radius: Option<f64>) -> Result<DiscretizationGraph> {
    region.check()?;
    if !(h > 0.0) {
        return Err(Error::Input("resolution must be positive".into()));
    }
    let hop = hop_radius.unwrap_or(4.0 * h);
    if !(hop >= h) {
        return Err(Error::Input("hop radius must be at least the resolution".into()));
    }
    let faces = region.faces(complex);
    let per_face: Vec<Vec<(Point, Vec<Point>)>> = faces
        .par_iter()
        .map(|&f| {
            face_samples(complex, region, f, h)
                .into_iter()
                .map(|x| {
                    let p = Point::new(f, x);
                    let reps = complex.representations(&p);
                    (complex.canonical(&p), reps)
                })
                .collect()
        })
        .collect();
    let nf = complex.faces().len();
    let mut g = DiscretizationGraph {
        h,
        hop_radius: hop,
        region: region.clone(),
        nodes: Vec::new(),
        reps: Vec::new(),
        members: vec![Vec::new(); nf],
        grids: vec![HashMap::new(); nf],
        index: HashMap::new(),
    };
    for list in per_face {
        for (canon, reps) in list {
            insert(&mut g, canon, &reps);
        }
    }
    Ok(g)
}

fn insert(g: &mut DiscretizationGraph, canon: Point, reps: &[Point]) -> u32 {
    if let Some(&i) = g.index.get(&key(&canon)) {
        return i;
    }
    let id = g.nodes.len() as u32;
    g.nodes.push(canon);
    g.index.insert(key(&canon), id);
    let mut mine = Vec::new();
    for r in reps {
        let m = g.members[r.face].len() as u32;
        g.members[r.face].push((id, r.coords));
        let c = g.cell(r.coords);
        g.grids[r.face].entry(c).or_default().push(m);
        mine.push((r.face, m));
    }
    g.reps.push(mine);
    id
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Length of the best graph path; an upper bound for the distance.
    pub distance_upper: f64,
    /// Distance from the endpoints to their nodes; zero, since endpoints join the graph.
    pub snap_error: f64,
    pub nodes: usize,
    /// Graph path, one point per hop.
    pub path: Vec<Point>,
}

#[derive(PartialEq)]
struct Item(f64, u32);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Shortest graph path between two points, joined to the graph as extra
/// nodes in every face that contains them.
pub fn oracle_distance(complex: &Complex, g: &DiscretizationGraph, p: &Point, q: &Point) -> Result<OracleResult> {
    complex.check_point(p)?;
    complex.check_point(q)?;
    let n = g.nodes.len();
    let (s, t) = (n as u32, n as u32 + 1);
    let ends = [complex.representations(p), complex.representations(q)];
    let reps_of = |u: u32| -> Vec<(FaceId, Vec2)> {
        if u >= s {
            ends[(u - s) as usize].iter().map(|r| (r.face, r.coords)).collect()
        } else {
            g.reps[u as usize].iter().map(|&(f, m)| (f, g.members[f][m as usize].1)).collect()
        }
    };
    let r2 = g.hop_radius * g.hop_radius * (1.0 + 1e-12);
    let mut dist = vec![f64::INFINITY; n + 2];
    let mut pred = vec![u32::MAX; n + 2];
    let mut heap = BinaryHeap::new();
    dist[s as usize] = 0.0;
    heap.push(Item(0.0, s));
    while let Some(Item(d, u)) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        if u == t {
            break;
        }
        for (face, x) in reps_of(u) {
            let norm = &complex.face(face).norm;
            let mut relax = |v: u32, y: Vec2| {
                let nd = d + norm.value(&geom::sub(y, x));
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    pred[v as usize] = u;
                    heap.push(Item(nd, v));
                }
            };
            g.neighbors(face, x, &mut relax);
            for r in ends[1].iter().filter(|r| r.face == face) {
                let w = geom::sub(r.coords, x);
                if geom::dot(w, w) <= r2 {
                    relax(t, r.coords);
                }
            }
        }
    }
    if !dist[t as usize].is_finite() {
        return Err(Error::Unreachable);
    }
    let node = |u: u32| match u {
        u if u == s => complex.canonical(p),
        u if u == t => complex.canonical(q),
        u => g.nodes[u as usize],
    };
    let mut path = vec![node(t)];
    let mut cur = t;
    while cur != s {
        cur = pred[cur as usize];
        path.push(node(cur));
    }
    path.reverse();
    Ok(OracleResult { distance_upper: dist[t as usize], snap_error: 0.0, nodes: n, path })
}
