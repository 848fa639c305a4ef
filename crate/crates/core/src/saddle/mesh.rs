use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dot;
use super::hull::{origin_in_hull, HullTest};
use crate::error::{Error, Result};

/// Triangulated surface in a vector space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<Vec<f64>>,
    pub triangles: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSaddle {
    pub vertex: usize,
    pub interior: bool,
    /// `None` for boundary vertices, which are skipped.
    pub saddle: Option<bool>,
    pub test: Option<HullTest>,
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Saddle test at every interior vertex: the vertex lies in the convex hull
/// of its star, tested on link vertices and link edge midpoints.
pub fn is_saddle_surface(mesh: &Mesh) -> Result<Vec<VertexSaddle>> {
    let n = mesh.vertices.len();
    let dim = mesh.vertices.first().map_or(0, Vec::len);
    if mesh.vertices.iter().any(|v| v.len() != dim) {
        return Err(Error::Input("mesh vertices differ in dimension".into()));
    }
    let mut opposite: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if tri.iter().any(|&i| i >= n) {
            return Err(Error::Input(format!("triangle {t} references a missing vertex")));
        }
        let [a, b, c] = tri.map(|i| &mesh.vertices[i]);
        let (u, v) = (sub(b, a), sub(c, a));
        let (uu, vv, uv) = (dot(&u, &u), dot(&v, &v), dot(&u, &v));
        if uu * vv - uv * uv <= 1e-24 * (uu * vv).max(1e-300) {
            return Err(Error::Validation(format!("triangle {t} is degenerate")));
        }
        let [i, j, k] = *tri;
        opposite[i].push((j, k));
        opposite[j].push((k, i));
        opposite[k].push((i, j));
    }
    Ok((0..n)
        .into_par_iter()
        .map(|v| {
            let edges = &opposite[v];
            let mut degree = std::collections::BTreeMap::new();
            for &(a, b) in edges {
                *degree.entry(a).or_insert(0) += 1;
                *degree.entry(b).or_insert(0) += 1;
            }
            let interior = !edges.is_empty() && degree.values().all(|&d| d == 2) && degree.len() == edges.len();
            if !interior {
                return VertexSaddle { vertex: v, interior, saddle: None, test: None };
            }
            let x = &mesh.vertices[v];
            let mut gens: Vec<Vec<f64>> = degree.keys().map(|&a| sub(&mesh.vertices[a], x)).collect();
            for &(a, b) in edges {
                let m: Vec<f64> = mesh.vertices[a].iter().zip(&mesh.vertices[b]).map(|(p, q)| 0.5 * (p + q)).collect();
                gens.push(sub(&m, x));
            }
            let test = origin_in_hull(&gens);
            VertexSaddle { vertex: v, interior, saddle: Some(test.contains()), test: Some(test) }
        })
        .collect())
}
