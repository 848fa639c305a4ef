//! Piecewise linear cones in normed spaces: saddle certificates, the induced
//! Finsler PL metric, and witnesses for uniqueness of geodesics.

mod hull;
mod mesh;
mod witness;
#[cfg(test)]
mod tests;

pub use hull::{exact_feasible, min_norm_point, origin_in_hull, HullTest, HullVerdict};
pub use mesh::{is_saddle_surface, Mesh, VertexSaddle};
pub use witness::{case_witness, case_witness_polylines, CaseKind, CaseReport};

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, Face, Gluing};
use crate::error::{Error, Result};
use crate::geom::{self, Vec2};
use crate::norms::{verify_norm_seeded, Norm, NormSpec};

/// A map from the plane, linear on each sector of a fan of rays.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleConeSurface {
    ambient: Norm,
    fan: Vec<Vec2>,
    /// Per sector `i` (between rays `i` and `i + 1`), row-major `dim x 2`.
    maps: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub ambient_dim: usize,
    pub ambient_norm: NormSpec,
    pub fan: Vec<Vec2>,
    pub sector_maps: Vec<Vec<f64>>,
}

fn angle_between(a: Vec2, b: Vec2) -> f64 {
    geom::cross(a, b).atan2(geom::dot(a, b)).rem_euclid(std::f64::consts::TAU)
}

fn apply(map: &[f64], v: Vec2) -> Vec<f64> {
    map.chunks(2).map(|r| r[0] * v[0] + r[1] * v[1]).collect()
}

impl SaddleConeSurface {
    pub fn new(ambient: Norm, fan: Vec<Vec2>, maps: Vec<Vec<f64>>) -> Result<Self> {
        let k = fan.len();
        let n = ambient.dim();
        if k < 3 || maps.len() != k {
            return Err(Error::Validation("need at least three rays and one map per sector".into()));
        }
        let fan: Vec<Vec2> = fan.iter().map(|&d| geom::scale(d, 1.0 / geom::len(d))).collect();
        let mut total = 0.0;
        for i in 0..k {
            let a = angle_between(fan[i], fan[(i + 1) % k]);
            if !(a > 1e-9 && a < std::f64::consts::PI - 1e-9) {
                return Err(Error::Validation(format!("sector {i} is not a convex sector")));
            }
            total += a;
        }
        if (total - std::f64::consts::TAU).abs() > 1e-9 {
            return Err(Error::Validation("rays must wind once counterclockwise".into()));
        }
        for (i, m) in maps.iter().enumerate() {
            if m.len() != 2 * n {
                return Err(Error::DimensionMismatch { expected: 2 * n, got: m.len() });
            }
            let (u, v) = (apply(m, fan[i]), apply(m, fan[(i + 1) % k]));
            let (uu, vv, uv) = (dot(&u, &u), dot(&v, &v), dot(&u, &v));
            if uu * vv - uv * uv <= 1e-20 * uu.max(vv).powi(2).max(1e-300) {
                return Err(Error::Validation(format!("sector {i} has a degenerate image")));
            }
            let next = &maps[(i + 1) % k];
            let (a, b) = (apply(m, fan[(i + 1) % k]), apply(next, fan[(i + 1) % k]));
            let gap = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            if gap > 1e-10 * (1.0 + a.iter().fold(0.0f64, |s, x| s.max(x.abs()))) {
                return Err(Error::Validation(format!("sectors {i} and {} disagree on their shared ray", (i + 1) % k)));
            }
        }
        Ok(Self { ambient, fan, maps })
    }

    /// Sector maps determined by the images of the rays.
    pub fn from_ray_images(ambient: Norm, fan: Vec<Vec2>, images: Vec<Vec<f64>>) -> Result<Self> {
        let k = fan.len();
        if images.len() != k {
            return Err(Error::Validation("one image per ray".into()));
        }
        let n = ambient.dim();
        let mut maps = Vec::with_capacity(k);
        for i in 0..k {
            let (a, b) = (fan[i], fan[(i + 1) % k]);
            let inv = geom::inverse(&[a[0], b[0], a[1], b[1]])
                .ok_or_else(|| Error::Validation(format!("rays {i} and {} are parallel", (i + 1) % k)))?;
            let (ia, ib) = (&images[i], &images[(i + 1) % k]);
            if ia.len() != n || ib.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: ia.len().min(ib.len()) });
            }
            let mut m = vec![0.0; 2 * n];
            for r in 0..n {
                m[2 * r] = ia[r] * inv[0] + ib[r] * inv[2];
                m[2 * r + 1] = ia[r] * inv[1] + ib[r] * inv[3];
            }
            maps.push(m);
        }
        Self::new(ambient, fan, maps)
    }

    /// The identity of the plane, split into four quadrants.
    pub fn flat() -> Self {
        let fan = vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        Self::new(Norm::euclidean(2), fan, vec![vec![1.0, 0.0, 0.0, 1.0]; 4]).expect("flat plane")
    }

    pub fn from_spec(spec: &SurfaceSpec) -> Result<Self> {
        let ambient = Norm::try_from(spec.ambient_norm.clone())?;
        if ambient.dim() != spec.ambient_dim {
            return Err(Error::DimensionMismatch { expected: spec.ambient_dim, got: ambient.dim() });
        }
        Self::new(ambient, spec.fan.clone(), spec.sector_maps.clone())
    }

    pub fn to_spec(&self) -> SurfaceSpec {
        SurfaceSpec {
            ambient_dim: self.ambient.dim(),
            ambient_norm: self.ambient.clone().into(),
            fan: self.fan.clone(),
            sector_maps: self.maps.clone(),
        }
    }

    pub fn ambient(&self) -> &Norm {
        &self.ambient
    }

    pub fn fan(&self) -> &[Vec2] {
        &self.fan
    }

    pub fn maps(&self) -> &[Vec<f64>] {
        &self.maps
    }

    pub fn sectors(&self) -> usize {
        self.fan.len()
    }

    /// Sector containing a nonzero plane vector.
    pub fn sector_of(&self, x: Vec2) -> usize {
        let k = self.fan.len();
        let a = angle_between(self.fan[0], x);
        let mut acc = 0.0;
        for i in 0..k {
            acc += angle_between(self.fan[i], self.fan[(i + 1) % k]);
            if a < acc - 1e-15 || i == k - 1 {
                return i;
            }
        }
        k - 1
    }

    /// The map itself.
    pub fn r(&self, x: Vec2) -> Vec<f64> {
        if x == [0.0, 0.0] {
            return vec![0.0; self.ambient.dim()];
        }
        apply(&self.maps[self.sector_of(x)], x)
    }

    /// Ray images and one bisector image per sector.
    pub fn generators(&self) -> Vec<Vec<f64>> {
        let k = self.fan.len();
        let mut g = Vec::with_capacity(2 * k);
        for i in 0..k {
            g.push(apply(&self.maps[i], self.fan[i]));
            let mid = geom::add(self.fan[i], self.fan[(i + 1) % k]);
            g.push(apply(&self.maps[i], geom::scale(mid, 1.0 / geom::len(mid))));
        }
        g
    }

    /// Length of the straight plane segment `[a, b]` under the induced metric.
    pub fn segment_length(&self, a: Vec2, b: Vec2) -> f64 {
        let d = geom::sub(b, a);
        let mut ts = vec![0.0, 1.0];
        for &f in &self.fan {
            // a + t d on the ray through f.
            let c = geom::cross(d, f);
            if c.abs() > 1e-300 {
                let t = geom::cross(a, f) / c;
                if t > 0.0 && t < 1.0 && geom::dot(geom::lerp(a, b, t), f) > 0.0 {
                    ts.push(t);
                }
            }
        }
        ts.sort_by(f64::total_cmp);
        let mut len = 0.0;
        for w in ts.windows(2) {
            let (p, q) = (geom::lerp(a, b, w[0]), geom::lerp(a, b, w[1]));
            let mid = geom::lerp(p, q, 0.5);
            if geom::len(mid) == 0.0 {
                continue;
            }
            len += self.ambient.value(&apply(&self.maps[self.sector_of(mid)], geom::sub(q, p)));
        }
        len
    }

    pub fn polyline_length(&self, pts: &[Vec2]) -> f64 {
        pts.windows(2).map(|w| self.segment_length(w[0], w[1])).sum()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Saddle test: the origin in the convex hull of the image minus the apex.
pub fn is_saddle_cone(surface: &SaddleConeSurface) -> HullTest {
    origin_in_hull(&surface.generators())
}

/// One face per sector with the pullback norm, glued along the rays.
pub fn induced_complex(surface: &SaddleConeSurface) -> Result<Complex> {
    let k = surface.sectors();
    let mut faces = Vec::with_capacity(k);
    for i in 0..k {
        let norm = Norm::pullback(surface.ambient.clone(), 2, surface.maps[i].clone())?;
        let report = verify_norm_seeded(&norm, 256, 1e-9, i as u64);
        if !report.convex {
            return Err(Error::Internal(format!("pullback norm of sector {i} failed verification")));
        }
        faces.push(Face::cone(i, surface.fan[i], surface.fan[(i + 1) % k], norm)?);
    }
    let gluings = (0..k).map(|i| Gluing::identity(i, 1, (i + 1) % k, 0)).collect();
    Complex::validated(faces, gluings)
}
