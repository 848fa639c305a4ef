use super::{Complex, Face, FaceId, Gluing, HalfPlane, Point};
use crate::error::{Error, Result};
use crate::geom;

/// The faces containing a point, with the point's coordinates in each.
#[derive(Debug, Clone, PartialEq)]
pub struct Star {
    pub center: Point,
    pub reps: Vec<Point>,
    pub faces: Vec<FaceId>,
    /// Edges through the center.
    pub edges: Vec<(FaceId, usize)>,
}

/// A complex whose faces are cones with apex at the chart origin.
#[derive(Debug, Clone)]
pub struct Cone {
    complex: Complex,
}

impl Cone {
    pub fn new(complex: Complex) -> Result<Self> {
        for f in complex.faces() {
            if !f.contains([0.0, 0.0], 1e-12) || f.edges().iter().any(|e| e.offset.abs() > 1e-12) {
                return Err(Error::Input(format!("face {} is not a cone with apex at the origin", f.id)));
            }
        }
        Ok(Self { complex })
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn apex(&self) -> Point {
        Point::new(0, [0.0, 0.0])
    }

    /// Scale `q` towards the apex by `t`.
    pub fn dilate(&self, q: &Point, t: f64) -> Result<Point> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Input("dilation factor must be a nonnegative number".into()));
        }
        self.complex.check_point(q)?;
        Ok(Point::new(q.face, geom::scale(q.coords, t)))
    }

    /// Distance to the apex along the radial segment.
    pub fn radial_distance(&self, q: &Point) -> f64 {
        self.complex.face(q.face).norm.value(&q.coords)
    }
}

/// Tangent cone at a point together with the chart map near it.
#[derive(Debug, Clone)]
pub struct TangentCone {
    pub cone: Cone,
    /// Cone face `i` is the local cone of `reps[i]`.
    pub reps: Vec<Point>,
    /// Original edge index of each cone face edge.
    pub edge_map: Vec<Vec<usize>>,
    /// Norm radius on which the chart map is an isometry onto its image.
    pub radius: f64,
}

impl TangentCone {
    /// Cone point of a point near the center, if within one of the star faces.
    pub fn to_cone(&self, q: &Point) -> Option<Point> {
        self.reps
            .iter()
            .enumerate()
            .filter(|(_, r)| r.face == q.face)
            .map(|(i, r)| Point::new(i, geom::sub(q.coords, r.coords)))
            .find(|c| self.cone.complex().face(c.face).contains(c.coords, 1e-9))
    }

    pub fn from_cone(&self, c: &Point) -> Point {
        let r = &self.reps[c.face];
        Point::new(r.face, geom::add(r.coords, c.coords))
    }
}

impl Complex {
    pub fn star(&self, p: &Point) -> Star {
        let reps = self.representations(p);
        let mut faces: Vec<FaceId> = reps.iter().map(|r| r.face).collect();
        faces.sort_unstable();
        faces.dedup();
        let mut edges = Vec::new();
        for r in &reps {
            for e in self.faces[r.face].edges_at(r.coords, 1e-9) {
                edges.push((r.face, e));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Star { center: *p, reps, faces, edges }
    }

    pub fn tangent_cone(&self, p: &Point) -> Result<TangentCone> {
        self.check_point(p)?;
        let reps = self.representations(p);
        let mut faces = Vec::with_capacity(reps.len());
        let mut edge_map = Vec::with_capacity(reps.len());
        let mut radius = f64::INFINITY;
        for (i, r) in reps.iter().enumerate() {
            let f = &self.faces[r.face];
            let active = f.edges_at(r.coords, 1e-9);
            let hs: Vec<HalfPlane> = active
                .iter()
                .map(|&e| HalfPlane { normal: f.edge(e).normal, offset: 0.0 })
                .collect();
            let mut lo = f64::INFINITY;
            for k in 0..64 {
                let a = std::f64::consts::TAU * k as f64 / 64.0;
                lo = lo.min(f.norm.value(&[a.cos(), a.sin()]));
            }
            let chart_r = f
                .edges()
                .iter()
                .enumerate()
                .filter(|(e, _)| !active.contains(e))
                .map(|(_, e)| -e.excess(r.coords))
                .fold(f64::INFINITY, f64::min);
            radius = radius.min(chart_r * lo);
            faces.push(Face::new(i, hs, f.norm.clone(), true)?);
            edge_map.push(active);
        }
        let mut gluings = Vec::new();
        for (gi, g) in self.gluings.iter().enumerate() {
            for (i, ra) in reps.iter().enumerate().filter(|(_, r)| r.face == g.face_a) {
                let Some(ka) = edge_map[i].iter().position(|&e| e == g.sub_a) else { continue };
                let y = g.apply(ra.coords);
                for (j, rb) in reps.iter().enumerate().filter(|(_, r)| r.face == g.face_b) {
                    let Some(kb) = edge_map[j].iter().position(|&e| e == g.sub_b) else { continue };
                    if geom::dist(y, rb.coords) <= 1e-7 * (1.0 + geom::len(y)) {
                        gluings.push(Gluing {
                            face_a: i,
                            sub_a: ka,
                            face_b: j,
                            sub_b: kb,
                            matrix: self.gluings[gi].matrix,
                            offset: [0.0, 0.0],
                        });
                    }
                }
            }
        }
        let complex = Complex::with_tolerances(faces, gluings, self.tol)?;
        Ok(TangentCone {
            cone: Cone::new(complex)?,
            reps,
            edge_map,
            radius,
        })
    }
}
