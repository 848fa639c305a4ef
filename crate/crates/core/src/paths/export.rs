use serde::{Deserialize, Serialize};

use super::VertexPath;
use crate::complex::{Complex, FaceId, Point};
use crate::error::{Error, Result};
use crate::geom::Vec2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathVertex {
    pub index: usize,
    pub face: FaceId,
    pub coords: Vec2,
    pub cumulative_length: f64,
}

/// JSON form of a broken line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub vertices: Vec<PathVertex>,
    #[serde(default)]
    pub edge_faces: Vec<FaceId>,
    #[serde(default)]
    pub length: f64,
    #[serde(default)]
    pub max_edge: f64,
    #[serde(default)]
    pub energy: f64,
}

impl PathRecord {
    pub fn new(path: &VertexPath) -> Self {
        let mut acc = 0.0;
        let lengths = path.edge_lengths();
        let vertices = path
            .vertices()
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                if i > 0 {
                    acc += lengths[i - 1];
                }
                PathVertex { index: i, face: p.face, coords: p.coords, cumulative_length: acc }
            })
            .collect();
        Self {
            vertices,
            edge_faces: path.edge_faces(),
            length: path.length(),
            max_edge: path.max_edge(),
            energy: path.energy(),
        }
    }

    pub fn points(&self) -> Vec<Point> {
        self.vertices.iter().map(|v| Point::new(v.face, v.coords)).collect()
    }
}

pub fn path_to_json(path: &VertexPath) -> String {
    serde_json::to_string_pretty(&PathRecord::new(path)).expect("path serializes")
}

/// Read vertices from a path record or a plain list of points.
pub fn path_from_json(s: &str) -> Result<Vec<Point>> {
    if let Ok(r) = serde_json::from_str::<PathRecord>(s) {
        return Ok(r.points());
    }
    serde_json::from_str::<Vec<Point>>(s).map_err(|e| Error::Input(format!("path JSON: {e}")))
}

/// CSV with columns index, face_id, x, y, cumulative_length.
pub fn path_to_csv(path: &VertexPath) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["index", "face_id", "x", "y", "cumulative_length"]).expect("csv header");
    for v in PathRecord::new(path).vertices {
        w.write_record([
            v.index.to_string(),
            v.face.to_string(),
            v.coords[0].to_string(),
            v.coords[1].to_string(),
            v.cumulative_length.to_string(),
        ])
        .expect("csv row");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8")
}

/// Read vertices back from [`path_to_csv`] output.
pub fn path_from_csv(s: &str) -> Result<Vec<Point>> {
    let mut r = csv::Reader::from_reader(s.as_bytes());
    let bad = |e: csv::Error| Error::Input(format!("path CSV: {e}"));
    let header = r.headers().map_err(bad)?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Input(format!("path CSV: missing column {name}")))
    };
    let (f, x, y) = (col("face_id")?, col("x")?, col("y")?);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(bad)?;
        let num = |i: usize| -> Result<f64> {
            rec[i].trim().parse().map_err(|_| Error::Input(format!("path CSV: bad number {:?}", &rec[i])))
        };
        let face = rec[f].trim().parse().map_err(|_| Error::Input(format!("path CSV: bad face id {:?}", &rec[f])))?;
        out.push(Point::new(face, [num(x)?, num(y)?]));
    }
    Ok(out)
}

/// Rebuild a path from exported vertices.
pub fn path_from_record(complex: &Complex, r: &PathRecord) -> Result<VertexPath> {
    VertexPath::from_points(complex, &r.points())
}
