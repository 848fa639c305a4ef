use serde::{Deserialize, Serialize};

use super::{Complex, Face, Gluing, HalfPlane, PeriodicComplex};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::norms::Norm;

fn two() -> usize {
    2
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// JSON form of a face: exactly one of `halfplanes`, `vertices` or `rays`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<usize>,
    #[serde(default = "two")]
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfplanes: Option<Vec<HalfPlane>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec2>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rays: Option<[Vec2; 2]>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub unbounded: bool,
    pub norm: Norm,
}

/// JSON form of a complex, optionally periodic under a deck gluing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub faces: Vec<FaceSpec>,
    #[serde(default)]
    pub gluings: Vec<Gluing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic: Option<Gluing>,
}

impl FaceSpec {
    pub fn build(&self, id: usize) -> Result<Face> {
        if let Some(given) = self.id {
            if given != id {
                return Err(Error::Input(format!("face ids must be 0..n in order; found {given} at position {id}")));
            }
        }
        if self.dim != 2 {
            return Err(Error::Input(format!("face {id}: only 2-dimensional faces are supported")));
        }
        match (&self.halfplanes, &self.vertices, &self.rays) {
            (Some(h), None, None) => Face::new(id, h.clone(), self.norm.clone(), self.unbounded),
            (None, Some(v), None) => Face::polygon(id, v, self.norm.clone()),
            (None, None, Some(r)) => Face::cone(id, r[0], r[1], self.norm.clone()),
            _ => Err(Error::Input(format!(
                "face {id}: give exactly one of halfplanes, vertices or rays"
            ))),
        }
    }
}

impl ComplexSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Input(format!("complex JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("complex spec serializes")
    }

    /// The complex described, ignoring any periodic structure.
    pub fn build(&self) -> Result<Complex> {
        self.build_with(Tolerances::default())
    }

    pub fn build_with(&self, tol: Tolerances) -> Result<Complex> {
        let faces = self
            .faces
            .iter()
            .enumerate()
            .map(|(i, f)| f.build(i))
            .collect::<Result<Vec<_>>>()?;
        Complex::with_tolerances(faces, self.gluings.clone(), tol)
    }

    pub fn build_periodic(&self) -> Result<Option<PeriodicComplex>> {
        self.build_periodic_with(Tolerances::default())
    }

    pub fn build_periodic_with(&self, tol: Tolerances) -> Result<Option<PeriodicComplex>> {
        match self.periodic {
            None => Ok(None),
            Some(deck) => Ok(Some(PeriodicComplex::new(self.build_with(tol)?, deck)?)),
        }
    }
}

impl Complex {
    pub fn to_spec(&self) -> ComplexSpec {
        ComplexSpec {
            faces: self
                .faces
                .iter()
                .map(|f| FaceSpec {
                    id: Some(f.id),
                    dim: 2,
                    halfplanes: Some(f.constraints().to_vec()),
                    vertices: None,
                    rays: None,
                    unbounded: f.declared_unbounded(),
                    norm: f.norm.clone(),
                })
                .collect(),
            gluings: self.gluings.clone(),
            periodic: None,
        }
    }

    pub fn to_json(&self) -> String {
        self.to_spec().to_json()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        ComplexSpec::from_json(s)?.build()
    }
}
