//! Is the origin in the convex hull of a finite point set? Wolfe's min-norm
//! point in floating point, with an exact simplex when the answer is close.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HullVerdict {
    /// Weights `λ ≥ 0` summing to one with `Σ λ_i v_i = 0`.
    Contains { weights: Vec<f64>, residual: f64 },
    /// A functional positive on every point.
    Separated { functional: Vec<f64>, margin: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullTest {
    pub verdict: HullVerdict,
    /// Distance from the origin to the hull, from the floating solve.
    pub distance: f64,
    /// The exact simplex decided the verdict.
    pub exact: bool,
}

impl HullTest {
    pub fn contains(&self) -> bool {
        matches!(self.verdict, HullVerdict::Contains { .. })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(points: &[Vec<f64>], set: &[usize], w: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; points[0].len()];
    for (&i, &wi) in set.iter().zip(w) {
        for (xk, pk) in x.iter_mut().zip(&points[i]) {
            *xk += wi * pk;
        }
    }
    x
}

/// Affine combination of the corral points closest to the origin.
fn affine_min(points: &[Vec<f64>], set: &[usize]) -> Vec<f64> {
    let k = set.len();
    let mut m = DMatrix::zeros(k + 1, k + 1);
    for (a, &i) in set.iter().enumerate() {
        for (b, &j) in set.iter().enumerate() {
            m[(a, b)] = dot(&points[i], &points[j]);
        }
        m[(a, k)] = 1.0;
        m[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = m.svd(true, true).solve(&rhs, 1e-14).expect("svd solve");
    (0..k).map(|a| sol[a]).collect()
}

/// Wolfe's algorithm: the point of the hull nearest the origin and its weights.
pub fn min_norm_point(points: &[Vec<f64>]) -> (Vec<f64>, Vec<usize>, Vec<f64>) {
    let scale = points.iter().map(|p| dot(p, p)).fold(0.0, f64::max).max(1e-300);
    let first = (0..points.len())
        .min_by(|&a, &b| dot(&points[a], &points[a]).total_cmp(&dot(&points[b], &points[b])))
        .expect("nonempty point set");
    let mut set = vec![first];
    let mut w = vec![1.0];
    let mut x = points[first].clone();
    for _ in 0..1000 {
        let xx = dot(&x, &x);
        if xx <= 1e-30 * scale {
            break;
        }
        let j = (0..points.len())
            .min_by(|&a, &b| dot(&x, &points[a]).total_cmp(&dot(&x, &points[b])))
            .expect("nonempty");
        if dot(&x, &points[j]) > xx - 1e-14 * scale || set.contains(&j) {
            break;
        }
        set.push(j);
        w.push(0.0);
        for _ in 0..1000 {
            let alpha = affine_min(points, &set);
            if alpha.iter().all(|&a| a > 1e-14) {
                w = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (a, b) in alpha.iter().zip(&w) {
                if *a <= 1e-14 && b - a > 0.0 {
                    theta = theta.min(b / (b - a));
                }
            }
            for (wi, ai) in w.iter_mut().zip(&alpha) {
                *wi = theta * ai + (1.0 - theta) * *wi;
            }
            let keep: Vec<bool> = w.iter().map(|&v| v > 1e-14).collect();
            let mut k = 0;
            set.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            w.retain(|&v| v > 1e-14);
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= s);
        }
        x = combine(points, &set, &w);
    }
    (x, set, w)
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Exact phase-one simplex for `Σ λ_i v_i = 0`, `Σ λ_i = 1`, `λ ≥ 0`,
/// with Bland's rule. Returns the weights when feasible.
pub fn exact_feasible(points: &[Vec<f64>]) -> Option<Vec<f64>> {
    let m = points.len();
    let n = points[0].len();
    let rows = n + 1;
    let cols = m + rows;
    // Tableau rows: constraints, then the objective (sum of artificials).
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(rows + 1);
    for r in 0..rows {
        let mut row = vec![BigRational::zero(); cols + 1];
        for (j, p) in points.iter().enumerate() {
            row[j] = if r < n { rat(p[r]) } else { BigRational::one() };
        }
        if r == n {
            row[cols] = BigRational::one();
        }
        // Keep the right-hand side nonnegative.
        if row[cols].is_negative() {
            row.iter_mut().for_each(|x| *x = -x.clone());
        }
        row[m + r] = BigRational::one();
        t.push(row);
    }
    let mut obj = vec![BigRational::zero(); cols + 1];
    for row in &t {
        for j in 0..=cols {
            if !(m..cols).contains(&j) {
                obj[j] -= &row[j];
            }
        }
    }
    t.push(obj);
    let mut basis: Vec<usize> = (m..cols).collect();
    for _ in 0..10_000 {
        let Some(enter) = (0..cols).find(|&j| t[rows][j].is_negative()) else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..rows {
            if t[r][enter].is_positive() {
                let ratio = &t[r][cols] / &t[r][enter];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else { break };
        let piv = t[pr][enter].clone();
        t[pr].iter_mut().for_each(|x| *x = &*x / &piv);
        let prow = t[pr].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != pr && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= &f * p;
                }
            }
        }
        basis[pr] = enter;
    }
    if !t[rows][cols].is_zero() {
        return None;
    }
    let mut w = vec![0.0; m];
    for (r, &b) in basis.iter().enumerate() {
        if b < m {
            w[b] = t[r][cols].to_f64().unwrap_or(0.0);
        }
    }
    Some(w)
}

fn residual(points: &[Vec<f64>], w: &[f64]) -> f64 {
    let all: Vec<usize> = (0..points.len()).collect();
    let x = combine(points, &all, w);
    dot(&x, &x).sqrt()
}

/// Decide whether the origin lies in the convex hull of `points`.
pub fn origin_in_hull(points: &[Vec<f64>]) -> HullTest {
    let scale = points.iter().map(|p| dot(p, p).sqrt()).fold(0.0, f64::max).max(1e-300);
    let (x, _, _) = min_norm_point(points);
    let distance = dot(&x, &x).sqrt();
    let separated = |exact: bool| {
        let nx = distance.max(1e-300);
        let functional: Vec<f64> = x.iter().map(|v| v / nx).collect();
        let margin = points.iter().map(|p| dot(&functional, p)).fold(f64::INFINITY, f64::min);
        HullTest { verdict: HullVerdict::Separated { functional, margin }, distance, exact }
    };
    if distance > 1e-8 * scale {
        return separated(false);
    }
    match exact_feasible(points) {
        Some(weights) => {
            let residual = residual(points, &weights);
            HullTest { verdict: HullVerdict::Contains { weights, residual }, distance, exact: true }
        }
        None => separated(true),
    }
}
