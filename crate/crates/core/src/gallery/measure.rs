use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::GalleryInstance;
use crate::complex::{Complex, Point};
use crate::config::SearchConfig;
use crate::error::{Error, Result};
use crate::norms::Side;
use crate::oracle::enumerate_geodesics;
use crate::paths::{is_geodesic_path, local_distance, midpoint, VertexPath};

fn distance(complex: &Complex, a: &Point, b: &Point, cfg: &SearchConfig) -> Result<f64> {
    let list = enumerate_geodesics(complex, a, b, cfg, 1e-9)?;
    match list.paths.first() {
        Some(p) => Ok(p.length()),
        None => Ok(local_distance(complex, a, b, cfg)?.0),
    }
}

/// Point of the glued half-planes at chart coordinates `x`.
fn half_plane_point(x: [f64; 2]) -> Point {
    Point::new(if x[1] >= 0.0 { 0 } else { 1 }, x)
}

/// Where and how finely to look for convexity failures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvexityProbe {
    /// Points `(x, 0)` whose distance to the y-axis is followed.
    pub feet: Vec<f64>,
    /// Heights on the y-axis at which midpoint convexity is tested.
    pub centers: Vec<f64>,
    pub steps: Vec<f64>,
    pub triangles: usize,
    /// Triangle vertices are drawn from `[-r, r]^2`.
    pub triangle_radius: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for ConvexityProbe {
    fn default() -> Self {
        Self {
            feet: vec![-1.0, -0.5, 0.25, 0.5, 1.0],
            centers: vec![0.0],
            steps: vec![0.02, 0.05, 0.1, 0.2],
            triangles: 200,
            triangle_radius: 1.0,
            tol: 1e-9,
            seed: 11,
        }
    }
}

/// `g(c) > (g(c - s) + g(c + s)) / 2` for `g(t) = d((x, 0), (0, t))`.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexityWitness {
    pub foot: f64,
    pub center: f64,
    pub step: f64,
    pub values: [f64; 3],
    pub margin: f64,
}

/// Midpoints of `[o, a]` and `[o, b]` further apart than half of `d(a, b)`.
#[derive(Debug, Clone, Serialize)]
pub struct BusemannWitness {
    pub o: Point,
    pub a: Point,
    pub b: Point,
    pub midpoint_distance: f64,
    pub half_base: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityReport {
    pub convexity_samples: usize,
    pub convexity_violations: Vec<ConvexityWitness>,
    pub worst_convexity_margin: f64,
    pub triangles: usize,
    /// Triangles skipped because a side had no unique midpoint.
    pub skipped: usize,
    pub busemann_violations: Vec<BusemannWitness>,
    pub worst_busemann_margin: f64,
}

/// Distance from points of the x-axis to points of the y-axis, tested for
/// midpoint convexity along the y-axis, and the Busemann midpoint inequality
/// on random triangles.
pub fn measure_convexity_failure(inst: &GalleryInstance, probe: &ConvexityProbe) -> Result<ConvexityReport> {
    if inst.name != "half-planes" {
        return Err(Error::Input(format!("convexity probes need the half-planes instance, got {}", inst.name)));
    }
    let complex = &*inst.complex;
    let cfg = SearchConfig::default();
    let mut jobs = Vec::new();
    for &x in &probe.feet {
        for &c in &probe.centers {
            for &s in &probe.steps {
                jobs.push((x, c, s));
            }
        }
    }
    let samples: Vec<ConvexityWitness> = jobs
        .par_iter()
        .map(|&(x, c, s)| {
            let foot = half_plane_point([x, 0.0]);
            let g = |t: f64| distance(complex, &foot, &half_plane_point([0.0, t]), &cfg);
            let values = [g(c - s)?, g(c)?, g(c + s)?];
            let margin = values[1] - 0.5 * (values[0] + values[2]);
            Ok(ConvexityWitness { foot: x, center: c, step: s, values, margin })
        })
        .collect::<Result<_>>()?;
    let worst_convexity_margin = samples.iter().map(|w| w.margin).fold(f64::NEG_INFINITY, f64::max);
    let convexity_samples = samples.len();
    let convexity_violations: Vec<_> = samples.into_iter().filter(|w| w.margin > probe.tol).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(probe.seed);
    let r = probe.triangle_radius;
    let triangles: Vec<[Point; 3]> = (0..probe.triangles)
        .map(|_| [(); 3].map(|_| half_plane_point([rng.gen_range(-r..r), rng.gen_range(-r..r)])))
        .collect();
    let outcomes: Vec<Option<BusemannWitness>> = triangles
        .par_iter()
        .map(|[o, a, b]| {
            let (Ok(m1), Ok(m2)) = (midpoint(complex, o, a, &cfg), midpoint(complex, o, b, &cfg)) else {
                return Ok(None);
            };
            let midpoint_distance = distance(complex, &m1, &m2, &cfg)?;
            let half_base = 0.5 * distance(complex, a, b, &cfg)?;
            Ok(Some(BusemannWitness {
                o: *o,
                a: *a,
                b: *b,
                midpoint_distance,
                half_base,
                margin: midpoint_distance - half_base,
            }))
        })
        .collect::<Result<_>>()?;
    let skipped = outcomes.iter().filter(|o| o.is_none()).count();
    let checked: Vec<BusemannWitness> = outcomes.into_iter().flatten().collect();
    let worst_busemann_margin = checked.iter().map(|w| w.margin).fold(f64::NEG_INFINITY, f64::max);
    let busemann_violations = checked
        .into_iter()
        .filter(|w| w.margin > probe.tol * (1.0 + w.half_base))
        .collect();
    Ok(ConvexityReport {
        convexity_samples,
        convexity_violations,
        worst_convexity_margin,
        triangles: probe.triangles,
        skipped,
        busemann_violations,
        worst_busemann_margin,
    })
}

/// Horizontal deviation of one geodesic from `x = 0`, period by period.
#[derive(Debug, Clone, Serialize)]
pub struct Track {
    pub offset: f64,
    pub deviations: Vec<f64>,
    /// Least-squares geometric ratio of successive deviations; 1 for a track on the axis.
    pub ratio: f64,
    pub non_increasing: bool,
    pub bounded: bool,
    pub geodesic: bool,
    pub length: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsReport {
    pub factor: f64,
    pub periods: usize,
    pub window_copies: usize,
    pub tracks: Vec<Track>,
}

fn fit_ratio(d: &[f64]) -> f64 {
    if d.iter().all(|&x| x <= 1e-12) {
        return 1.0;
    }
    if d.iter().any(|&x| x <= 0.0) {
        return f64::NAN;
    }
    let n = d.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = d.iter().map(|x| x.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (k, x) in d.iter().enumerate() {
        let dx = k as f64 - mx;
        sxy += dx * (x.ln() - my);
        sxx += dx * dx;
    }
    if sxx == 0.0 {
        1.0
    } else {
        (sxy / sxx).exp()
    }
}

/// For each offset `e`, the geodesic from `(e, -2)` in copy 0 to `(e, -2)` in
/// the last of `window` copies of the belt's universal cover, with its
/// deviation from `x = 0` recorded where it enters each of the first
/// `periods + 1` copies. The far end should sit well past the measured range
/// so its pull stays small.
pub fn measure_asymptotics(
    inst: &GalleryInstance,
    offsets: &[f64],
    periods: usize,
    window: usize,
) -> Result<AsymptoticsReport> {
    let periodic = inst
        .periodic
        .as_ref()
        .ok_or_else(|| Error::Input(format!("{} has no periodic cover", inst.name)))?;
    if periods == 0 {
        return Err(Error::Input("at least one period is needed".into()));
    }
    let factor = inst.param("factor").unwrap_or(1.0);
    if window < periods + 1 {
        return Err(Error::Input(format!("a window of {window} copies cannot show {periods} periods")));
    }
    let copies = window;
    let window = periodic.window(copies)?;
    let cfg = SearchConfig {
        max_faces: 2 * copies + 2,
        max_face_repeats: 1,
        ..SearchConfig::default()
    };
    let tracks = offsets
        .par_iter()
        .map(|&e| {
            if !(e.abs() < 1.0) {
                return Err(Error::Input(format!("offset {e} leaves the strip")));
            }
            let start = Point::new(periodic.face_in_copy(0, 0), [e, -2.0]);
            let end = Point::new(periodic.face_in_copy(copies - 1, 0), [e, -2.0]);
            let (length, path) = local_distance(&window, &start, &end, &cfg)?;
            let deviations = entry_deviations(periodic, &path, periods)?;
            let geodesic = is_geodesic_path(&window, &path, &cfg, 1e-7)?.geodesic;
            let tol = 1e-12 * (1.0 + e.abs());
            let non_increasing = deviations.windows(2).all(|w| w[1] <= w[0] + tol);
            let bounded = deviations.iter().all(|&d| d <= e.abs() + tol);
            Ok(Track {
                offset: e,
                ratio: fit_ratio(&deviations),
                deviations,
                non_increasing,
                bounded,
                geodesic,
                length,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AsymptoticsReport { factor, periods, window_copies: copies, tracks })
}

fn entry_deviations(periodic: &crate::complex::PeriodicComplex, path: &VertexPath, periods: usize) -> Result<Vec<f64>> {
    (0..=periods)
        .map(|k| {
            let face = periodic.face_in_copy(k, 0);
            path.segments()
                .iter()
                .find(|s| s.face == face && (s.from[1] + 2.0).abs() < 1e-7)
                .map(|s| s.from[0].abs())
                .ok_or_else(|| Error::Internal(format!("geodesic does not enter copy {k} through its bottom side")))
        })
        .collect()
}

/// One broken line `[p, x, y, q]` of the fan.
#[derive(Debug, Clone, Serialize)]
pub struct FanMember {
    pub offset: f64,
    pub length: f64,
    pub geodesic: bool,
    pub worst_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FanReport {
    /// Largest horizontal offset of `[x, y]` for which `[p, x, y, q]` is a geodesic.
    pub half_width: f64,
    pub members: Vec<FanMember>,
    pub all_geodesic: bool,
    pub spread: f64,
    /// Lengths strictly increase with `|offset|` on each side of 0.
    pub monotone: bool,
    /// Smallest increase between neighbours on either side.
    pub monotone_margin: f64,
    /// A member just outside the half-width fails the geodesic test.
    pub outside_fails: bool,
}

/// Broken lines `[p, x, y, q]` with `[x, y]` a vertical crossing of the middle
/// strip at horizontal offset `d` from the line through `p` and `q`. Each is
/// checked with one-sided derivatives at the crossings.
pub fn geodesic_fan(inst: &GalleryInstance, p: [f64; 2], q: [f64; 2], count: usize) -> Result<FanReport> {
    if inst.name != "flag" {
        return Err(Error::Input(format!("the fan needs the flag instance, got {}", inst.name)));
    }
    if (p[0] - q[0]).abs() > 1e-9 * (1.0 + p[0].abs()) {
        return Err(Error::Input(format!("p and q are not on a common vertical: {p:?}, {q:?}")));
    }
    let hw = 0.5 * inst.param("width").unwrap_or(1.0);
    if !(p[1] > hw && q[1] < -hw) {
        return Err(Error::Input("p must lie in the top strip and q in the bottom strip".into()));
    }
    let complex = &*inst.complex;
    let mid = &complex.face(1).norm;
    let down = [0.0, -1.0];
    let slope = mid
        .dir_deriv(&down, &[1.0, 0.0], Side::Plus)?
        .min(mid.dir_deriv(&down, &[-1.0, 0.0], Side::Plus)?);
    let run = (p[1] - hw).min(-hw - q[1]);
    let half_width = if slope >= 1.0 { f64::INFINITY } else { slope.max(0.0) * run / (1.0 - slope * slope).sqrt() };
    let count = count.max(3) | 1;
    let cfg = SearchConfig::default();
    let line = |d: f64| -> Result<VertexPath> {
        let x = p[0] + d;
        VertexPath::from_points(
            complex,
            &[Point::new(0, p), Point::new(1, [x, hw]), Point::new(1, [x, -hw]), Point::new(2, q)],
        )
    };
    let span = 0.9 * half_width.min(run);
    let members = (0..count)
        .into_par_iter()
        .map(|i| {
            let d = span * (2.0 * i as f64 / (count - 1) as f64 - 1.0);
            let path = line(d)?;
            let check = is_geodesic_path(complex, &path, &cfg, 1e-9)?;
            Ok(FanMember { offset: d, length: path.length(), geodesic: check.geodesic, worst_margin: check.worst_margin })
        })
        .collect::<Result<Vec<_>>>()?;
    let outside_fails = if half_width.is_finite() {
        !is_geodesic_path(complex, &line(1.2 * half_width)?, &cfg, 1e-9)?.geodesic
    } else {
        false
    };
    let lengths: Vec<f64> = members.iter().map(|m| m.length).collect();
    let spread = lengths.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - lengths.iter().cloned().fold(f64::INFINITY, f64::min);
    let c = count / 2;
    let mut monotone_margin = f64::INFINITY;
    for k in 0..c {
        monotone_margin = monotone_margin.min(lengths[c + k + 1] - lengths[c + k]);
        monotone_margin = monotone_margin.min(lengths[c - k - 1] - lengths[c - k]);
    }
    Ok(FanReport {
        half_width,
        all_geodesic: members.iter().all(|m| m.geodesic),
        members,
        spread,
        monotone: monotone_margin > 0.0,
        monotone_margin,
        outside_fails,
    })
}
