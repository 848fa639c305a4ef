use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Region;
use crate::complex::{Complex, Point};
use crate::config::SearchConfig;
use crate::error::Result;
use crate::paths::{is_geodesic_path, local_search, VertexPath};
use crate::shortening::ball_point;

#[derive(Debug, Clone)]
pub struct GeodesicList {
    /// Distinct geodesics, shortest first.
    pub paths: Vec<VertexPath>,
    /// The face-sequence bound was hit.
    pub truncated: bool,
}

impl GeodesicList {
    pub fn lengths(&self) -> Vec<f64> {
        self.paths.iter().map(VertexPath::length).collect()
    }
}

const PROBES: [f64; 4] = [1e-3, 1e-2, 5e-2, 0.15];

/// Locally minimal broken lines from `p` to `q` within the configured length
/// window of the shortest one. Each face-sequence optimum is kept when it passes
/// the vertex-wise geodesic test; crossings are also pinned off the optimum and
/// the rest relaxed, which finds whole families of geodesics through corners of
/// non-smooth norms.
pub fn enumerate_geodesics(complex: &Complex, p: &Point, q: &Point, cfg: &SearchConfig, tol: f64) -> Result<GeodesicList> {
    let r = local_search(complex, p, q, cfg, cfg.length_window)?;
    let dedup = cfg.dedup_distance.max(10.0 * tol);
    let mut out: Vec<VertexPath> = Vec::new();
    let push = |path: VertexPath, out: &mut Vec<VertexPath>| -> Result<()> {
        if out.iter().any(|o| crate::paths::search::same_path(complex, o, &path, dedup)) {
            return Ok(());
        }
        if is_geodesic_path(complex, &path, cfg, tol)?.geodesic {
            out.push(path);
        }
        Ok(())
    };
    for c in &r.candidates {
        push(c.path.clone(), &mut out)?;
    }
    if !complex.is_smooth() {
        for c in &r.candidates {
            let mut problem = c.walk.problem(complex);
            let scale = c.length.max(1e-12);
            for j in 0..problem.vars() {
                for &f in &PROBES {
                    for sign in [1.0, -1.0] {
                        let v = c.params[j] + sign * f * scale;
                        let (lo, hi) = (problem.lo[j], problem.hi[j]);
                        if v < lo || v > hi {
                            continue;
                        }
                        problem.lo[j] = v;
                        problem.hi[j] = v;
                        let mut s0 = c.params.clone();
                        s0[j] = v;
                        let (s, _) = problem.solve(&s0);
                        let path = c.walk.path(&problem, &s);
                        problem.lo[j] = lo;
                        problem.hi[j] = hi;
                        push(path, &mut out)?;
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.length().total_cmp(&b.length()));
    Ok(GeodesicList { paths: out, truncated: r.truncated })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ambiguity {
    pub a: Point,
    pub b: Point,
    pub lengths: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub pairs: usize,
    pub ambiguous: usize,
    /// Pairs the search could not connect.
    pub failed: usize,
    pub truncated: usize,
    pub witnesses: Vec<Ambiguity>,
}

const WITNESSES: usize = 8;

/// Sample pairs at distance at most `radius` around random centers of the
/// region and count those joined by more than one geodesic.
pub fn uniqueness_scan(
    complex: &Complex,
    region: &Region,
    radius: f64,
    n_pairs: usize,
    seed: u64,
    cfg: &SearchConfig,
) -> Result<ScanReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        let x = region.sample(complex, &mut rng)?;
        let a = ball_point(complex, &x, 0.5 * radius, &mut rng);
        let b = ball_point(complex, &x, 0.5 * radius, &mut rng);
        pairs.push((a, b));
    }
    let results: Vec<Option<GeodesicList>> = pairs
        .par_iter()
        .map(|(a, b)| enumerate_geodesics(complex, a, b, cfg, 1e-6).ok())
        .collect();
    let mut report = ScanReport { pairs: n_pairs, ambiguous: 0, failed: 0, truncated: 0, witnesses: Vec::new() };
    for ((a, b), r) in pairs.iter().zip(results) {
        match r {
            None => report.failed += 1,
            Some(g) => {
                report.truncated += usize::from(g.truncated);
                if g.paths.len() > 1 {
                    report.ambiguous += 1;
                    if report.witnesses.len() < WITNESSES {
                        report.witnesses.push(Ambiguity { a: *a, b: *b, lengths: g.lengths() });
                    }
                }
            }
        }
    }
    Ok(report)
}
