use serde::{Deserialize, Serialize};

/// Floating tolerances shared by all modules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Structural checks: gluing isometry, incidence, cycle consistency.
    pub structural: f64,
    /// Metric comparisons: distances, geodesic tests.
    pub metric: f64,
    /// Slack on polyhedron constraints when locating points.
    pub containment: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structural: 1e-10,
            metric: 1e-9,
            containment: 1e-9,
        }
    }
}

/// Face-sequence search parameters for local distance queries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Maximum number of faces in a sequence.
    pub max_faces: usize,
    /// Maximum number of times a single face may appear in a sequence.
    pub max_face_repeats: usize,
    /// Hard cap on the number of sequences solved per query.
    pub max_sequences: usize,
    /// Relative length window kept by geodesic enumeration (1.0 keeps paths up to 2x the minimum).
    pub length_window: f64,
    /// Relative tolerance under which two distinct minimizers count as a tie.
    pub tie_tolerance: f64,
    /// Two paths closer than this (sampled, chart units) are the same path.
    pub dedup_distance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_faces: 8,
            max_face_repeats: 2,
            max_sequences: 20_000,
            length_window: 1.0,
            tie_tolerance: 1e-9,
            dedup_distance: 1e-6,
        }
    }
}

/// Stopping rule for iterated midpoint shortening.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShortenConfig {
    /// Target accuracy of the limit in chart units.
    pub tol: f64,
    pub max_iter: usize,
    /// Length of the displacement history carried by a non-convergence error.
    pub tail: usize,
}

impl Default for ShortenConfig {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 100_000, tail: 16 }
    }
}

/// Sampled search for the uniqueness radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadiusConfig {
    /// Pairs sampled per tested radius.
    pub pairs: usize,
    /// Bisection steps.
    pub steps: usize,
    /// Largest radius tried.
    pub r_max: f64,
    pub seed: u64,
}

impl Default for RadiusConfig {
    fn default() -> Self {
        Self { pairs: 24, steps: 10, r_max: 1.0, seed: 7 }
    }
}
