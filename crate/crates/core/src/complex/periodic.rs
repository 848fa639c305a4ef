use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::{Complex, FaceId, Gluing};
use crate::error::{Error, Result};

const MAX_COPIES: usize = 4096;

/// A fundamental domain plus a deck gluing. The universal cover is unrolled on
/// demand into windows of consecutive copies; copy `c` has face ids
/// `c * faces + f`, and the deck gluing joins copy `c` to copy `c + 1`.
#[derive(Debug)]
pub struct PeriodicComplex {
    base: Complex,
    deck: Gluing,
    cache: RwLock<HashMap<usize, Arc<Complex>>>,
}

impl Clone for PeriodicComplex {
    fn clone(&self) -> Self {
        Self {
            base: self.base.clone(),
            deck: self.deck,
            cache: RwLock::new(HashMap::new()),
        }
    }
}

impl PeriodicComplex {
    pub fn new(base: Complex, deck: Gluing) -> Result<Self> {
        let p = Self {
            base,
            deck,
            cache: RwLock::new(HashMap::new()),
        };
        // Index checks via the quotient.
        p.quotient()?;
        Ok(p)
    }

    pub fn base(&self) -> &Complex {
        &self.base
    }

    pub fn deck(&self) -> &Gluing {
        &self.deck
    }

    pub fn faces_per_copy(&self) -> usize {
        self.base.faces().len()
    }

    pub fn face_in_copy(&self, copy: usize, face: FaceId) -> FaceId {
        copy * self.faces_per_copy() + face
    }

    pub fn copy_of(&self, face: FaceId) -> (usize, FaceId) {
        (face / self.faces_per_copy(), face % self.faces_per_copy())
    }

    /// The fundamental domain with the deck gluing applied.
    pub fn quotient(&self) -> Result<Complex> {
        let mut gluings = self.base.gluings().to_vec();
        gluings.push(self.deck);
        Complex::with_tolerances(self.base.faces().to_vec(), gluings, *self.base.tolerances())
    }

    /// `copies` consecutive copies of the fundamental domain.
    pub fn window(&self, copies: usize) -> Result<Arc<Complex>> {
        if copies == 0 {
            return Err(Error::Input("window needs at least one copy".into()));
        }
        if copies > MAX_COPIES {
            return Err(Error::Resource(format!("window of {copies} copies exceeds the limit of {MAX_COPIES}")));
        }
        if let Some(c) = self.cache.read().expect("window cache").get(&copies) {
            return Ok(Arc::clone(c));
        }
        let n = self.faces_per_copy();
        let mut faces = Vec::with_capacity(n * copies);
        let mut gluings = Vec::new();
        for c in 0..copies {
            for f in self.base.faces() {
                let mut f = f.clone();
                f.id += c * n;
                faces.push(f);
            }
            for g in self.base.gluings() {
                let mut g = *g;
                g.face_a += c * n;
                g.face_b += c * n;
                gluings.push(g);
            }
            if c + 1 < copies {
                let mut g = self.deck;
                g.face_a += c * n;
                g.face_b += (c + 1) * n;
                gluings.push(g);
            }
        }
        let built = Arc::new(Complex::with_tolerances(faces, gluings, *self.base.tolerances())?);
        let mut cache = self.cache.write().expect("window cache");
        Ok(Arc::clone(cache.entry(copies).or_insert(built)))
    }
}
