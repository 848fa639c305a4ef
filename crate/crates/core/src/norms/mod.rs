//! Norm families on finite-dimensional charts.
//!
//! Every shipped family is symmetric, positively homogeneous and strictly
//! convex. All but [`Norm::MaxOfEllipsoidal`] (and anything built on top of
//! it) are C1 off the origin; the non-smooth family is quarantined: [`Norm::grad`]
//! refuses corner points and callers must fall back to [`Norm::dir_deriv`].

mod spec;
mod verify;

pub use spec::NormSpec;
pub use verify::{verify_norm, verify_norm_seeded, Gauge, NormReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest chart or ambient dimension supported by the stack buffers.
pub const MAX_DIM: usize = 8;

/// Relative gap under which two pieces of a max-norm count as simultaneously active.
const ACTIVE_REL_TOL: f64 = 1e-12;

/// Side of a one-sided directional derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

/// A strictly convex, positively homogeneous norm on `R^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormSpec", into = "NormSpec")]
pub enum Norm {
    /// `scale * |v|`.
    EuclideanScaled { dim: usize, scale: f64 },
    /// `sqrt(v^T Q v)` for a symmetric positive-definite `Q` (row-major).
    Ellipsoidal { dim: usize, q: Vec<f64> },
    /// `(sum |v_i|^p)^(1/p)`, `1 < p < inf`.
    Lp { dim: usize, p: f64 },
    /// Pointwise maximum of ellipsoidal norms; non-smooth where pieces tie.
    MaxOfEllipsoidal { dim: usize, parts: Vec<Norm> },
    /// A base norm reshaped inside a cone around `+-direction`.
    ConePatched(Box<ConePatch>),
    /// `w -> base(A w)` for an injective linear map `A` (row-major, `base.dim() x dim`).
    Pullback {
        dim: usize,
        base: Box<Norm>,
        map: Vec<f64>,
    },
}

/// Multiplicative reshaping of a base norm inside the cone of half-angle
/// `half_angle` around `+-direction`. On the axis the patched norm takes the
/// value `target`; outside the cone it equals the base norm exactly. The
/// profile is the quintic smoothstep in angular distance, so the patched norm
/// stays C2 across the cone boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct ConePatch {
    pub base: Norm,
    /// Euclidean-unit direction in chart coordinates.
    pub direction: Vec<f64>,
    pub half_angle: f64,
    pub target: f64,
    /// `target / base(direction) - 1`.
    gain: f64,
}

impl ConePatch {
    pub fn new(base: Norm, direction: &[f64], half_angle: f64, target: f64) -> Result<Self> {
        let dim = base.dim();
        if direction.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: direction.len(),
            });
        }
        let len = euclid(direction);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::Input("patch direction must be nonzero".into()));
        }
        if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
            return Err(Error::Input(format!(
                "patch half-angle must lie in (0, pi/2), got {half_angle}"
            )));
        }
        if !(target > 0.0) || !target.is_finite() {
            return Err(Error::Input("patch target must be positive".into()));
        }
        let direction: Vec<f64> = direction.iter().map(|x| x / len).collect();
        let gain = target / base.value(&direction) - 1.0;
        Ok(Self {
            base,
            direction,
            half_angle,
            target,
            gain,
        })
    }

    /// Angular distance to the nearer of `+-direction`, with the sign of `v . direction`.
    fn angle(&self, v: &[f64]) -> (f64, f64, f64) {
        let len = euclid(v);
        let dot = dot(v, &self.direction);
        let sign = if dot >= 0.0 { 1.0 } else { -1.0 };
        let c = (sign * dot / len).clamp(0.0, 1.0);
        (c.acos(), sign, len)
    }

    fn multiplier(&self, alpha: f64) -> (f64, f64) {
        if alpha >= self.half_angle {
            return (1.0, 0.0);
        }
        let x = 1.0 - alpha / self.half_angle;
        let s = x * x * x * (x * (6.0 * x - 15.0) + 10.0);
        let ds = 30.0 * x * x * (x - 1.0) * (x - 1.0);
        (1.0 + self.gain * s, -self.gain * ds / self.half_angle)
    }

    /// Gradient of the angular distance, or `None` on the axis where the profile is flat.
    fn angle_grad(&self, v: &[f64], sign: f64, len: f64, out: &mut [f64]) -> bool {
        let dot = dot(v, &self.direction);
        let c = (sign * dot / len).clamp(-1.0, 1.0);
        let sin = (1.0 - c * c).max(0.0).sqrt();
        if sin < 1e-9 {
            return false;
        }
        let l3 = len * len * len;
        for i in 0..v.len() {
            let dc = sign * (self.direction[i] / len - dot * v[i] / l3);
            out[i] = -dc / sin;
        }
        true
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn euclid(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn mat_vec(m: &[f64], rows: usize, cols: usize, v: &[f64], out: &mut [f64]) {
    for r in 0..rows {
        out[r] = (0..cols).map(|c| m[r * cols + c] * v[c]).sum();
    }
}

fn quad_form(q: &[f64], dim: usize, v: &[f64]) -> f64 {
    let mut s = 0.0;
    for r in 0..dim {
        let mut row = 0.0;
        for c in 0..dim {
            row += q[r * dim + c] * v[c];
        }
        s += v[r] * row;
    }
    s
}

impl Norm {
    pub fn euclidean(dim: usize) -> Self {
        Norm::EuclideanScaled { dim, scale: 1.0 }
    }

    pub fn euclidean_scaled(dim: usize, scale: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Input(format!("scale must be positive, got {scale}")));
        }
        Ok(Norm::EuclideanScaled { dim, scale })
    }

    /// Ellipsoidal norm from a row-major symmetric positive-definite matrix.
    pub fn ellipsoidal(dim: usize, q: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if q.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: q.len(),
            });
        }
        for r in 0..dim {
            for c in 0..dim {
                let (a, b) = (q[r * dim + c], q[c * dim + r]);
                if !a.is_finite() || (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
                    return Err(Error::Input("ellipsoidal matrix must be symmetric".into()));
                }
            }
        }
        let m = nalgebra::DMatrix::from_row_slice(dim, dim, &q);
        if m.cholesky().is_none() {
            return Err(Error::Input("ellipsoidal matrix must be positive definite".into()));
        }
        Ok(Norm::Ellipsoidal { dim, q })
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Input(format!("lp exponent must lie in (1, inf), got {p}")));
        }
        Ok(Norm::Lp { dim, p })
    }

    pub fn max_of(parts: Vec<Norm>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(Error::Input("max-of-ellipsoidal needs at least two parts".into()));
        }
        let dim = parts[0].dim();
        for p in &parts {
            if !matches!(p, Norm::Ellipsoidal { .. }) {
                return Err(Error::Input("max-of-ellipsoidal parts must be ellipsoidal".into()));
            }
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        Ok(Norm::MaxOfEllipsoidal { dim, parts })
    }

    pub fn cone_patched(base: Norm, direction: &[f64], half_angle: f64, target: f64) -> Result<Self> {
        Ok(Norm::ConePatched(Box::new(ConePatch::new(
            base, direction, half_angle, target,
        )?)))
    }

    /// Pullback of `base` along the linear map `map` (row-major, `base.dim() x dim`).
    pub fn pullback(base: Norm, dim: usize, map: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        let rows = base.dim();
        if map.len() != rows * dim {
            return Err(Error::DimensionMismatch {
                expected: rows * dim,
                got: map.len(),
            });
        }
        let m = nalgebra::DMatrix::from_row_slice(rows, dim, &map);
        let rank = m.clone().svd(false, false).rank(1e-12 * m.norm().max(1.0));
        if rank < dim {
            return Err(Error::Input(format!(
                "pullback map has rank {rank} < {dim}; the result would not be a norm"
            )));
        }
        Ok(Norm::Pullback {
            dim,
            base: Box::new(base),
            map,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Norm::EuclideanScaled { dim, .. }
            | Norm::Ellipsoidal { dim, .. }
            | Norm::Lp { dim, .. }
            | Norm::MaxOfEllipsoidal { dim, .. }
            | Norm::Pullback { dim, .. } => *dim,
            Norm::ConePatched(p) => p.base.dim(),
        }
    }

    /// True when the norm is C1 everywhere off the origin.
    pub fn is_smooth(&self) -> bool {
        match self {
            Norm::MaxOfEllipsoidal { .. } => false,
            Norm::ConePatched(p) => p.base.is_smooth(),
            Norm::Pullback { base, .. } => base.is_smooth(),
            _ => true,
        }
    }

    /// Checked evaluation.
    pub fn eval(&self, v: &[f64]) -> Result<f64> {
        self.check(v)?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("vector has non-finite entries".into()));
        }
        Ok(self.value(v))
    }

    /// Unchecked evaluation; the caller guarantees `v.len() == self.dim()`.
    pub fn value(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.dim());
        match self {
            Norm::EuclideanScaled { scale, .. } => scale * euclid(v),
            Norm::Ellipsoidal { dim, q } => quad_form(q, *dim, v).max(0.0).sqrt(),
            Norm::Lp { p, .. } => {
                let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                if m == 0.0 {
                    return 0.0;
                }
                let s: f64 = v.iter().map(|x| (x.abs() / m).powf(*p)).sum();
                m * s.powf(1.0 / p)
            }
            Norm::MaxOfEllipsoidal { parts, .. } => {
                parts.iter().map(|n| n.value(v)).fold(0.0, f64::max)
            }
            Norm::ConePatched(patch) => {
                let b = patch.base.value(v);
                if b == 0.0 {
                    return 0.0;
                }
                let (alpha, _, _) = patch.angle(v);
                b * patch.multiplier(alpha).0
            }
            Norm::Pullback { dim, base, map } => {
                let rows = base.dim();
                let mut buf = [0.0; MAX_DIM];
                mat_vec(map, rows, *dim, v, &mut buf[..rows]);
                base.value(&buf[..rows])
            }
        }
    }

    fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Whether the norm is differentiable at `v` (nonzero).
    pub fn is_smooth_at(&self, v: &[f64]) -> bool {
        match self {
            Norm::MaxOfEllipsoidal { parts, .. } => {
                let vals: Vec<f64> = parts.iter().map(|n| n.value(v)).collect();
                let top = vals.iter().cloned().fold(0.0, f64::max);
                vals.iter()
                    .filter(|&&x| top - x <= ACTIVE_REL_TOL * top)
                    .count()
                    == 1
            }
            Norm::ConePatched(p) => p.base.is_smooth_at(v),
            Norm::Pullback { dim, base, map } => {
                let rows = base.dim();
                let mut buf = [0.0; MAX_DIM];
                mat_vec(map, rows, *dim, v, &mut buf[..rows]);
                base.is_smooth_at(&buf[..rows])
            }
            _ => true,
        }
    }

    /// Gradient (the derivative as a covector). Fails at the origin and at
    /// corner points of non-smooth variants.
    pub fn grad(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v)?;
        if v.iter().all(|x| *x == 0.0) {
            return Err(Error::ZeroVector);
        }
        if !self.is_smooth_at(v) {
            return Err(Error::NonSmoothPoint { at: v.to_vec() });
        }
        let mut out = vec![0.0; v.len()];
        self.subgradient_into(v, &mut out);
        Ok(out)
    }

    /// An element of the subdifferential at `v`; the gradient where it exists,
    /// zero at the origin. Used by the solvers, which must tolerate corners.
    pub fn subgradient_into(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Norm::EuclideanScaled { scale, .. } => {
                let l = euclid(v);
                for (o, x) in out.iter_mut().zip(v) {
                    *o = if l > 0.0 { scale * x / l } else { 0.0 };
                }
            }
            Norm::Ellipsoidal { dim, q } => {
                let n = quad_form(q, *dim, v).max(0.0).sqrt();
                if n == 0.0 {
                    out.iter_mut().for_each(|o| *o = 0.0);
                    return;
                }
                mat_vec(q, *dim, *dim, v, out);
                out.iter_mut().for_each(|o| *o /= n);
            }
            Norm::Lp { p, .. } => {
                let n = self.value(v);
                if n == 0.0 {
                    out.iter_mut().for_each(|o| *o = 0.0);
                    return;
                }
                for (o, x) in out.iter_mut().zip(v) {
                    *o = x.signum() * (x.abs() / n).powf(p - 1.0);
                }
            }
            Norm::MaxOfEllipsoidal { parts, .. } => {
                let (mut best, mut idx) = (f64::NEG_INFINITY, 0);
                for (i, n) in parts.iter().enumerate() {
                    let val = n.value(v);
                    if val > best {
                        best = val;
                        idx = i;
                    }
                }
                parts[idx].subgradient_into(v, out);
            }
            Norm::ConePatched(patch) => {
                let dim = v.len();
                let b = patch.base.value(v);
                patch.base.subgradient_into(v, out);
                if b == 0.0 {
                    return;
                }
                let (alpha, sign, len) = patch.angle(v);
                let (m, dm) = patch.multiplier(alpha);
                out.iter_mut().for_each(|o| *o *= m);
                if dm != 0.0 {
                    let mut ga = [0.0; MAX_DIM];
                    if patch.angle_grad(v, sign, len, &mut ga[..dim]) {
                        for i in 0..dim {
                            out[i] += b * dm * ga[i];
                        }
                    }
                }
            }
            Norm::Pullback { dim, base, map } => {
                let rows = base.dim();
                let mut img = [0.0; MAX_DIM];
                let mut g = [0.0; MAX_DIM];
                mat_vec(map, rows, *dim, v, &mut img[..rows]);
                base.subgradient_into(&img[..rows], &mut g[..rows]);
                for c in 0..*dim {
                    out[c] = (0..rows).map(|r| map[r * dim + c] * g[r]).sum();
                }
            }
        }
    }

    /// One-sided directional derivative of the norm at `v` in direction `w`.
    ///
    /// `Plus` is `lim_{h->0+} (N(v+hw)-N(v))/h`, `Minus` is the limit from the
    /// left, equal to `-D+(v; -w)`. Convexity gives `plus >= minus`.
    pub fn dir_deriv(&self, v: &[f64], w: &[f64], side: Side) -> Result<f64> {
        self.check(v)?;
        self.check(w)?;
        if v.iter().all(|x| *x == 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(match side {
            Side::Plus => self.dir_deriv_plus(v, w),
            Side::Minus => {
                let neg: Vec<f64> = w.iter().map(|x| -x).collect();
                -self.dir_deriv_plus(v, &neg)
            }
        })
    }

    pub(crate) fn dir_deriv_plus(&self, v: &[f64], w: &[f64]) -> f64 {
        match self {
            Norm::MaxOfEllipsoidal { parts, .. } => {
                let vals: Vec<f64> = parts.iter().map(|n| n.value(v)).collect();
                let top = vals.iter().cloned().fold(0.0, f64::max);
                parts
                    .iter()
                    .zip(&vals)
                    .filter(|(_, &x)| top - x <= ACTIVE_REL_TOL * top)
                    .map(|(n, _)| n.dir_deriv_plus(v, w))
                    .fold(f64::NEG_INFINITY, f64::max)
            }
            Norm::ConePatched(patch) => {
                let dim = v.len();
                let b = patch.base.value(v);
                let db = patch.base.dir_deriv_plus(v, w);
                let (alpha, sign, len) = patch.angle(v);
                let (m, dm) = patch.multiplier(alpha);
                let mut ga = [0.0; MAX_DIM];
                let angular = if dm != 0.0 && patch.angle_grad(v, sign, len, &mut ga[..dim]) {
                    b * dm * dot(&ga[..dim], w)
                } else {
                    0.0
                };
                m * db + angular
            }
            Norm::Pullback { dim, base, map } => {
                let rows = base.dim();
                let mut av = [0.0; MAX_DIM];
                let mut aw = [0.0; MAX_DIM];
                mat_vec(map, rows, *dim, v, &mut av[..rows]);
                mat_vec(map, rows, *dim, w, &mut aw[..rows]);
                base.dir_deriv_plus(&av[..rows], &aw[..rows])
            }
            _ => {
                let mut g = [0.0; MAX_DIM];
                self.subgradient_into(v, &mut g[..v.len()]);
                dot(&g[..v.len()], w)
            }
        }
    }

    /// Basis of the orthogonal complement of a unit vector: the kernel of the
    /// derivative of the norm at `v`. Not a symmetric relation.
    pub fn orth_complement_basis(&self, v: &[f64]) -> Result<Vec<Vec<f64>>> {
        let g = self.grad(v)?;
        let dim = v.len();
        if dim == 1 {
            return Ok(Vec::new());
        }
        // Gram-Schmidt on the coordinate basis after projecting out g.
        let gg = dot(&g, &g);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim - 1);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| g[a].abs().total_cmp(&g[b].abs()));
        for &i in &order {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            let c = g[i] / gg;
            for k in 0..dim {
                e[k] -= c * g[k];
            }
            for b in &basis {
                let c = dot(&e, b);
                for k in 0..dim {
                    e[k] -= c * b[k];
                }
            }
            let l = dot(&e, &e).sqrt();
            if l > 1e-8 {
                e.iter_mut().for_each(|x| *x /= l);
                basis.push(e);
                if basis.len() == dim - 1 {
                    break;
                }
            }
        }
        Ok(basis)
    }

    /// Convenience for 2-dimensional charts: the kernel direction of the derivative at `v`.
    pub fn orth_direction_2d(&self, v: [f64; 2]) -> Result<[f64; 2]> {
        let g = self.grad(&v)?;
        let l = (g[0] * g[0] + g[1] * g[1]).sqrt();
        Ok([-g[1] / l, g[0] / l])
    }

    /// Piece index of the active ellipsoid, used to locate corners. Smooth
    /// families report a single piece.
    pub fn active_piece(&self, v: &[f64]) -> usize {
        match self {
            Norm::MaxOfEllipsoidal { parts, .. } => {
                let mut best = (f64::NEG_INFINITY, 0);
                for (i, n) in parts.iter().enumerate() {
                    let val = n.value(v);
                    if val > best.0 {
                        best = (val, i);
                    }
                }
                best.1
            }
            Norm::ConePatched(p) => p.base.active_piece(v),
            Norm::Pullback { dim, base, map } => {
                let rows = base.dim();
                let mut buf = [0.0; MAX_DIM];
                mat_vec(map, rows, *dim, v, &mut buf[..rows]);
                base.active_piece(&buf[..rows])
            }
            _ => 0,
        }
    }

    /// Multiply the norm by a positive constant.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::Input("scale factor must be positive".into()));
        }
        Ok(match self {
            Norm::EuclideanScaled { dim, scale } => Norm::EuclideanScaled {
                dim: *dim,
                scale: scale * factor,
            },
            Norm::Ellipsoidal { dim, q } => Norm::Ellipsoidal {
                dim: *dim,
                q: q.iter().map(|x| x * factor * factor).collect(),
            },
            Norm::MaxOfEllipsoidal { dim, parts } => Norm::MaxOfEllipsoidal {
                dim: *dim,
                parts: parts
                    .iter()
                    .map(|p| p.scaled(factor))
                    .collect::<Result<_>>()?,
            },
            Norm::ConePatched(p) => {
                Norm::cone_patched(p.base.scaled(factor)?, &p.direction, p.half_angle, p.target * factor)?
            }
            other => {
                let dim = other.dim();
                let map: Vec<f64> = (0..dim * dim)
                    .map(|i| if i / dim == i % dim { factor } else { 0.0 })
                    .collect();
                Norm::pullback(other.clone(), dim, map)?
            }
        })
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::Input(format!("dimension must lie in 1..={MAX_DIM}, got {dim}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
