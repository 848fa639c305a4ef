use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{shorten_to_geodesic, AdmissibleSequence};
use crate::complex::Complex;
use crate::config::{SearchConfig, ShortenConfig};
use crate::error::{Error, Result};
use crate::paths::{local_distance, VertexPath};

const SAMPLES: usize = 32;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomotopyReport {
    /// Longest member of the family.
    pub l0: f64,
    pub rho: f64,
    /// Edges per subdivided member.
    pub pieces: usize,
    /// Length of each limit, in family order.
    pub limit_lengths: Vec<f64>,
    /// Largest distance between corresponding arc-length samples of any limit and the first.
    pub max_deviation: f64,
    pub all_equal: bool,
    /// Interior family indices where the limit length is a strict local minimum.
    pub strict_local_minima: Vec<usize>,
    /// Every interior index is a strict local minimum while lengths vary.
    pub violation: bool,
    #[serde(skip)]
    pub limits: Vec<VertexPath>,
}

fn sample_gap(complex: &Complex, a: &VertexPath, b: &VertexPath, cfg: &SearchConfig) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..=SAMPLES {
        let t = k as f64 / SAMPLES as f64;
        let (p, q) = (a.at_fraction(t), b.at_fraction(t));
        let d = match complex.face_distance(&p, &q) {
            Some((d, _, _)) => d,
            None => local_distance(complex, &p, &q, cfg)?.0,
        };
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Shorten every member of a discrete homotopy and compare the limits.
pub fn homotopy_unique(
    complex: &Complex,
    family: &[VertexPath],
    rho: f64,
    cfg: &SearchConfig,
    opts: &ShortenConfig,
) -> Result<HomotopyReport> {
    if family.is_empty() {
        return Err(Error::Input("empty family".into()));
    }
    if !(rho > 0.0) {
        return Err(Error::Input("uniqueness radius must be positive".into()));
    }
    let (p, q) = (family[0].start(), family[0].end());
    for (i, g) in family.iter().enumerate() {
        if !complex.same_point(&g.start(), &p, 1e-9) || !complex.same_point(&g.end(), &q, 1e-9) {
            return Err(Error::Input(format!("member {i} does not share the endpoints")));
        }
    }
    for (i, w) in family.windows(2).enumerate() {
        let gap = sample_gap(complex, &w[0], &w[1], cfg)?;
        if gap >= rho {
            return Err(Error::Input(format!("members {i} and {} are {gap} apart, not below {rho}", i + 1)));
        }
    }
    let l0 = family.iter().map(VertexPath::length).fold(0.0, f64::max);
    let pieces = (2.0 * l0 / rho).floor() as usize + 1;
    let limits = family
        .par_iter()
        .map(|g| {
            let s = AdmissibleSequence::subdivide(complex, g, pieces, rho, cfg)?;
            Ok(shorten_to_geodesic(complex, &s, cfg, opts)?.path())
        })
        .collect::<Result<Vec<_>>>()?;
    let limit_lengths: Vec<f64> = limits.iter().map(VertexPath::length).collect();
    let mut max_deviation = 0.0f64;
    for l in &limits[1..] {
        max_deviation = max_deviation.max(sample_gap(complex, &limits[0], l, cfg)?);
    }
    let strict_local_minima: Vec<usize> = (1..limits.len().saturating_sub(1))
        .filter(|&i| limit_lengths[i] < limit_lengths[i - 1] - 1e-9 && limit_lengths[i] < limit_lengths[i + 1] - 1e-9)
        .collect();
    let violation = limits.len() >= 3 && strict_local_minima.len() == limits.len() - 2;
    Ok(HomotopyReport {
        l0,
        rho,
        pieces,
        limit_lengths,
        max_deviation,
        all_equal: max_deviation <= 1e-6,
        strict_local_minima,
        violation,
        limits,
    })
}
