use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{dot, euclid, Norm};

/// Minimal interface needed to audit a candidate norm. Implemented by
/// [`Norm`]; tests implement it for deliberately defective gauges.
pub trait Gauge: Sync {
    fn dim(&self) -> usize;
    fn value(&self, v: &[f64]) -> f64;
    /// Whether the gauge claims to be C1 off the origin.
    fn claims_smooth(&self) -> bool {
        false
    }
    /// Analytic gradient, when available.
    fn gradient(&self, _v: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

impl Gauge for Norm {
    fn dim(&self) -> usize {
        Norm::dim(self)
    }
    fn value(&self, v: &[f64]) -> f64 {
        Norm::value(self, v)
    }
    fn claims_smooth(&self) -> bool {
        self.is_smooth()
    }
    fn gradient(&self, v: &[f64]) -> Option<Vec<f64>> {
        self.grad(v).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub strictly_convex: bool,
    pub convex: bool,
    pub smooth: bool,
    pub smooth_claimed: bool,
    /// Smallest `1 - N((u+w)/2)` over sampled unit pairs.
    pub worst_midpoint_margin: f64,
    pub segment_witness: Option<[Vec<f64>; 2]>,
    /// Largest relative gradient error against central differences.
    pub worst_gradient_error: Option<f64>,
    /// Largest jump of the tangential derivative found along sampled circles.
    pub corner_jump: f64,
    pub corner_witness: Option<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
}

/// Sampling audit with the default seed.
pub fn verify_norm<G: Gauge + ?Sized>(norm: &G, sample_count: usize, tol: f64) -> NormReport {
    verify_norm_seeded(norm, sample_count, tol, 0)
}

const MIN_PAIR_SEPARATION: f64 = 0.05;
const FD_REL_STEP: f64 = 1e-6;
const FD_REL_TOL: f64 = 1e-5;
const CIRCLE_STEPS: usize = 4096;
const CORNER_JUMP: f64 = 1e-5;

fn random_unit<G: Gauge + ?Sized>(norm: &G, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..norm.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let e = euclid(&v);
        if e > 1e-3 && e <= 1.0 {
            let n = norm.value(&v);
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Sampling audit of strict convexity and smoothness, deterministic per seed.
///
/// Strict convexity: random unit pairs `u, w` at chart distance at least 0.05
/// must satisfy `N((u+w)/2) < 1 - tol`. Smoothness: where the gauge claims C1,
/// analytic gradients are compared with central differences (step `1e-6 N(v)`,
/// relative tolerance `1e-5`); independently, the tangential derivative along
/// sampled great circles is scanned for jumps, which are localized by bisection.
pub fn verify_norm_seeded<G: Gauge + ?Sized>(
    norm: &G,
    sample_count: usize,
    tol: f64,
    seed: u64,
) -> NormReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = norm.dim();
    let samples = sample_count.max(2);

    let mut worst = f64::INFINITY;
    let mut witness = None;
    for _ in 0..samples {
        let (u, w) = loop {
            let u = random_unit(norm, &mut rng);
            let w = random_unit(norm, &mut rng);
            let d: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a - b).collect();
            if euclid(&d) >= MIN_PAIR_SEPARATION {
                break (u, w);
            }
        };
        let mid: Vec<f64> = u.iter().zip(&w).map(|(a, b)| 0.5 * (a + b)).collect();
        let margin = 1.0 - norm.value(&mid);
        if margin < worst {
            worst = margin;
            witness = Some([u, w]);
        }
    }
    let strictly_convex = worst > tol;
    let convex = worst > -tol;

    let smooth_claimed = norm.claims_smooth();
    let mut worst_grad = None;
    let mut grad_ok = true;
    if smooth_claimed {
        let mut w = 0.0f64;
        for _ in 0..samples {
            let v = random_unit(norm, &mut rng);
            let Some(g) = norm.gradient(&v) else {
                grad_ok = false;
                continue;
            };
            let h = FD_REL_STEP * norm.value(&v);
            let mut fd = vec![0.0; dim];
            let mut probe = v.clone();
            for i in 0..dim {
                probe[i] = v[i] + h;
                let up = norm.value(&probe);
                probe[i] = v[i] - h;
                let dn = norm.value(&probe);
                probe[i] = v[i];
                fd[i] = (up - dn) / (2.0 * h);
            }
            let diff: Vec<f64> = fd.iter().zip(&g).map(|(a, b)| a - b).collect();
            let err = euclid(&diff) / euclid(&g).max(1e-300);
            w = w.max(err);
        }
        grad_ok = grad_ok && w <= FD_REL_TOL;
        worst_grad = Some(w);
    }

    let planes = if dim == 2 { 1 } else { (samples / 64).clamp(4, 16) };
    let mut corner_jump = 0.0f64;
    let mut corner_witness = None;
    for plane in 0..planes {
        let (e1, e2) = if dim == 2 && plane == 0 {
            (vec![1.0, 0.0], vec![0.0, 1.0])
        } else {
            random_plane(dim, &mut rng)
        };
        if let Some((jump, at)) = scan_circle(norm, &e1, &e2) {
            if jump > corner_jump {
                corner_jump = jump;
                corner_witness = Some(at);
            }
        }
    }
    let cornered = corner_jump > CORNER_JUMP;

    NormReport {
        strictly_convex,
        convex,
        smooth: grad_ok && !cornered,
        smooth_claimed,
        worst_midpoint_margin: worst,
        segment_witness: if strictly_convex { None } else { witness },
        worst_gradient_error: worst_grad,
        corner_jump,
        corner_witness: if cornered { corner_witness } else { None },
        samples,
        seed,
    }
}

fn random_plane(dim: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    loop {
        let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let na = euclid(&a);
        if na < 1e-3 {
            continue;
        }
        let e1: Vec<f64> = a.iter().map(|x| x / na).collect();
        let p = dot(&b, &e1);
        let r: Vec<f64> = b.iter().zip(&e1).map(|(x, y)| x - p * y).collect();
        let nr = euclid(&r);
        if nr < 1e-3 {
            continue;
        }
        return (e1, r.iter().map(|x| x / nr).collect());
    }
}

/// Largest derivative jump along the unit circle of the plane spanned by `e1, e2`.
fn scan_circle<G: Gauge + ?Sized>(norm: &G, e1: &[f64], e2: &[f64]) -> Option<(f64, Vec<f64>)> {
    let at = |t: f64| -> Vec<f64> {
        e1.iter()
            .zip(e2)
            .map(|(a, b)| a * t.cos() + b * t.sin())
            .collect()
    };
    let f = |t: f64| norm.value(&at(t));
    let deriv = |t: f64, h: f64| (f(t + h) - f(t - h)) / (2.0 * h);
    let step = std::f64::consts::TAU / CIRCLE_STEPS as f64;
    let d: Vec<f64> = (0..=CIRCLE_STEPS)
        .map(|k| deriv(k as f64 * step, 1e-3 * step))
        .collect();
    let mut jumps: Vec<(f64, usize)> = (0..CIRCLE_STEPS)
        .map(|k| ((d[k + 1] - d[k]).abs(), k))
        .collect();
    let mut sorted: Vec<f64> = jumps.iter().map(|j| j.0).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    jumps.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for &(j, k) in jumps.iter().take(16) {
        if j <= 5.0 * median + 1e-9 {
            break;
        }
        let (mut a, mut b) = (k as f64 * step, (k + 1) as f64 * step);
        while b - a > 1e-8 {
            let m = 0.5 * (a + b);
            let h = ((b - a) * 1e-3).max(1e-11);
            let (da, dm, db) = (deriv(a, h), deriv(m, h), deriv(b, h));
            if (dm - da).abs() >= (db - dm).abs() {
                b = m;
            } else {
                a = m;
            }
        }
        let h = (b - a).max(1e-8) * 4.0;
        let m = 0.5 * (a + b);
        let jump = ((f(m + h) - f(m)) / h - (f(m) - f(m - h)) / h).abs();
        if best.as_ref().map_or(true, |x| jump > x.0) {
            best = Some((jump, at(m)));
        }
    }
    best
}
