//! Convex minimization of path length over edge-crossing parameters for a
//! fixed sequence of faces.

use crate::geom::{self, Vec2};
use crate::norms::Norm;

/// One straight piece inside a face: from `c + s_prev * d` to `a + s_next * b`.
#[derive(Debug, Clone)]
pub(crate) struct Term<'a> {
    pub norm: &'a Norm,
    pub a: Vec2,
    pub b: Vec2,
    pub c: Vec2,
    pub d: Vec2,
    pub prev: Option<usize>,
    pub next: Option<usize>,
}

impl Term<'_> {
    #[inline]
    pub fn entry(&self, s: &[f64]) -> Vec2 {
        match self.prev {
            Some(j) => geom::axpy(self.c, s[j], self.d),
            None => self.c,
        }
    }

    #[inline]
    pub fn exit(&self, s: &[f64]) -> Vec2 {
        match self.next {
            Some(j) => geom::axpy(self.a, s[j], self.b),
            None => self.a,
        }
    }

    #[inline]
    pub fn vector(&self, s: &[f64]) -> Vec2 {
        geom::sub(self.exit(s), self.entry(s))
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Problem<'a> {
    pub terms: Vec<Term<'a>>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Characteristic chart length, for step sizes.
    pub scale: f64,
}

fn grad_at(norm: &Norm, v: Vec2) -> Vec2 {
    let mut g = [0.0; 2];
    norm.subgradient_into(&v, &mut g);
    g
}

impl<'a> Problem<'a> {
    pub fn vars(&self) -> usize {
        self.lo.len()
    }

    pub fn value(&self, s: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.norm.value(&t.vector(s))).sum()
    }

    fn gradient(&self, s: &[f64], g: &mut [f64]) {
        g.iter_mut().for_each(|x| *x = 0.0);
        for t in &self.terms {
            let gv = grad_at(t.norm, t.vector(s));
            if let Some(j) = t.next {
                g[j] += geom::dot(gv, t.b);
            }
            if let Some(j) = t.prev {
                g[j] -= geom::dot(gv, t.d);
            }
        }
    }

    /// Tridiagonal Hessian: `diag[j]` and `off[j]` coupling `j` and `j + 1`.
    fn hessian(&self, s: &[f64], diag: &mut [f64], off: &mut [f64]) {
        diag.iter_mut().for_each(|x| *x = 0.0);
        off.iter_mut().for_each(|x| *x = 0.0);
        for t in &self.terms {
            let v = t.vector(s);
            let l = geom::len(v);
            if l < 1e-12 * self.scale {
                continue;
            }
            let h = 1e-6 * l;
            let mut hm = [[0.0; 2]; 2];
            for i in 0..2 {
                let mut vp = v;
                let mut vm = v;
                vp[i] += h;
                vm[i] -= h;
                let (gp, gm) = (grad_at(t.norm, vp), grad_at(t.norm, vm));
                for k in 0..2 {
                    hm[k][i] = (gp[k] - gm[k]) / (2.0 * h);
                }
            }
            let sym = 0.5 * (hm[0][1] + hm[1][0]);
            hm[0][1] = sym;
            hm[1][0] = sym;
            let quad = |x: Vec2, y: Vec2| {
                x[0] * (hm[0][0] * y[0] + hm[0][1] * y[1]) + x[1] * (hm[1][0] * y[0] + hm[1][1] * y[1])
            };
            if let Some(j) = t.next {
                diag[j] += quad(t.b, t.b);
            }
            if let Some(j) = t.prev {
                diag[j] += quad(t.d, t.d);
            }
            if let (Some(p), Some(q)) = (t.prev, t.next) {
                debug_assert_eq!(p + 1, q);
                off[p] -= quad(t.d, t.b);
            }
        }
    }

    fn clamp(&self, s: &mut [f64]) {
        for j in 0..s.len() {
            s[j] = s[j].clamp(self.lo[j], self.hi[j]);
        }
    }

    /// Minimize from `s0`; returns the parameters and the length.
    pub fn solve(&self, s0: &[f64]) -> (Vec<f64>, f64) {
        let n = self.vars();
        let mut s = s0.to_vec();
        self.clamp(&mut s);
        let mut f = self.value(&s);
        if n == 0 {
            return (s, f);
        }
        let mut g = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        let mut step = vec![0.0; n];
        let mut trial = vec![0.0; n];
        let mut lambda = 1e-9;
        let eps = 1e-13 * self.scale;
        for _ in 0..200 {
            self.gradient(&s, &mut g);
            self.hessian(&s, &mut diag, &mut off);
            let free: Vec<bool> = (0..n)
                .map(|j| !((s[j] <= self.lo[j] + eps && g[j] > 0.0) || (s[j] >= self.hi[j] - eps && g[j] < 0.0)))
                .collect();
            let dmax = diag.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1e-300);
            let mut improved = false;
            for _ in 0..12 {
                let mut dd: Vec<f64> = (0..n)
                    .map(|j| if free[j] { diag[j].max(0.0) + lambda * dmax + 1e-300 } else { 1.0 })
                    .collect();
                let mut oo: Vec<f64> = (0..n.saturating_sub(1))
                    .map(|j| if free[j] && free[j + 1] { off[j] } else { 0.0 })
                    .collect();
                let mut rhs: Vec<f64> = (0..n).map(|j| if free[j] { -g[j] } else { 0.0 }).collect();
                thomas(&mut dd, &mut oo, &mut rhs);
                step.copy_from_slice(&rhs);
                let mut alpha = 1.0;
                for _ in 0..40 {
                    for j in 0..n {
                        trial[j] = s[j] + alpha * step[j];
                    }
                    self.clamp(&mut trial);
                    let ft = self.value(&trial);
                    if ft < f {
                        let gain = f - ft;
                        s.copy_from_slice(&trial);
                        f = ft;
                        improved = gain > 1e-15 * f.max(1e-300);
                        break;
                    }
                    alpha *= 0.5;
                }
                if improved {
                    lambda = (lambda * 0.25).max(1e-12);
                    break;
                }
                lambda *= 10.0;
                if lambda > 1e8 {
                    break;
                }
            }
            if !improved {
                break;
            }
        }
        if self.terms.iter().any(|t| !t.norm.is_smooth()) {
            self.polish(&mut s, &mut f);
        } else {
            self.refine(&mut s, &mut f, eps);
        }
        (s, f)
    }

    /// Plain Newton steps accepted while the free gradient shrinks. Values stop
    /// resolving the optimum near 1e-8; gradients keep going.
    fn refine(&self, s: &mut [f64], f: &mut f64, eps: f64) {
        let n = self.vars();
        let mut g = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        let mut trial = vec![0.0; n];
        let mut gt = vec![0.0; n];
        let free_norm = |s: &[f64], g: &[f64]| {
            (0..n)
                .filter(|&j| !((s[j] <= self.lo[j] + eps && g[j] > 0.0) || (s[j] >= self.hi[j] - eps && g[j] < 0.0)))
                .map(|j| g[j] * g[j])
                .sum::<f64>()
        };
        self.gradient(s, &mut g);
        let mut gn = free_norm(s, &g);
        for _ in 0..8 {
            if gn == 0.0 {
                break;
            }
            self.hessian(s, &mut diag, &mut off);
            let free: Vec<bool> = (0..n)
                .map(|j| !((s[j] <= self.lo[j] + eps && g[j] > 0.0) || (s[j] >= self.hi[j] - eps && g[j] < 0.0)))
                .collect();
            if diag.iter().zip(&free).any(|(&d, &fr)| fr && !(d > 0.0)) {
                break;
            }
            let mut dd: Vec<f64> = (0..n).map(|j| if free[j] { diag[j] } else { 1.0 }).collect();
            let mut oo: Vec<f64> =
                (0..n.saturating_sub(1)).map(|j| if free[j] && free[j + 1] { off[j] } else { 0.0 }).collect();
            let mut rhs: Vec<f64> = (0..n).map(|j| if free[j] { -g[j] } else { 0.0 }).collect();
            thomas(&mut dd, &mut oo, &mut rhs);
            for j in 0..n {
                trial[j] = s[j] + rhs[j];
            }
            self.clamp(&mut trial);
            let ft = self.value(&trial);
            self.gradient(&trial, &mut gt);
            let gtn = free_norm(&trial, &gt);
            if !(gtn < gn) || ft > *f + 1e-14 * f.abs() {
                break;
            }
            s.copy_from_slice(&trial);
            g.copy_from_slice(&gt);
            *f = ft;
            gn = gtn;
        }
    }

    /// Exact line searches along coordinates and along directions that keep a
    /// piece's direction fixed; these pass kinks of non-smooth norms.
    fn polish(&self, s: &mut Vec<f64>, f: &mut f64) {
        let n = self.vars();
        let mut dirs: Vec<Vec<(usize, f64)>> = (0..n).map(|j| vec![(j, 1.0)]).collect();
        for t in &self.terms {
            if let (Some(p), Some(q)) = (t.prev, t.next) {
                let v = t.vector(s);
                let cb = geom::cross(t.b, v);
                if geom::len(v) > 1e-12 * self.scale && cb.abs() > 1e-12 * geom::len(v) {
                    dirs.push(vec![(p, 1.0), (q, geom::cross(t.d, v) / cb)]);
                }
            }
        }
        let mut h = 1e-3 * self.scale;
        for _ in 0..60 {
            let before = *f;
            for dir in &dirs {
                let (tlo, thi) = self.ray_bounds(s, dir);
                if thi - tlo <= 0.0 {
                    continue;
                }
                let mut buf = s.clone();
                let mut phi = |t: f64| {
                    for &(j, w) in dir {
                        buf[j] = s[j] + t * w;
                    }
                    self.value(&buf)
                };
                let (t, v) = line_min(&mut phi, tlo, thi, h, *f);
                if v < *f {
                    for &(j, w) in dir {
                        s[j] = (s[j] + t * w).clamp(self.lo[j], self.hi[j]);
                    }
                    *f = self.value(s);
                }
            }
            if before - *f <= 1e-16 * before.max(1e-300) {
                if h <= 1e-9 * self.scale {
                    break;
                }
                h *= 1e-2;
            }
        }
    }

    fn ray_bounds(&self, s: &[f64], dir: &[(usize, f64)]) -> (f64, f64) {
        let (mut tlo, mut thi) = (f64::NEG_INFINITY, f64::INFINITY);
        for &(j, w) in dir {
            if w > 0.0 {
                tlo = tlo.max((self.lo[j] - s[j]) / w);
                thi = thi.min((self.hi[j] - s[j]) / w);
            } else if w < 0.0 {
                tlo = tlo.max((self.hi[j] - s[j]) / w);
                thi = thi.min((self.lo[j] - s[j]) / w);
            }
        }
        (tlo.min(0.0), thi.max(0.0))
    }
}

/// Solve a symmetric tridiagonal system in place; the answer ends up in `rhs`.
fn thomas(diag: &mut [f64], off: &mut [f64], rhs: &mut [f64]) {
    let n = diag.len();
    for i in 1..n {
        let w = off[i - 1] / diag[i - 1];
        diag[i] -= w * off[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
    }
}

/// Minimize a convex function of one variable on `[lo, hi]` (containing 0),
/// starting from a trial step `h`. Returns the argmin and the value.
pub(crate) fn line_min(phi: &mut impl FnMut(f64) -> f64, lo: f64, hi: f64, h: f64, f0: f64) -> (f64, f64) {
    let fp = if hi > 0.0 { phi(h.min(hi)) } else { f64::INFINITY };
    let fm = if lo < 0.0 { phi((-h).max(lo)) } else { f64::INFINITY };
    let (mut a, mut b);
    if fp >= f0 && fm >= f0 {
        a = (-h).max(lo);
        b = h.min(hi);
    } else {
        let sign = if fp < fm { 1.0 } else { -1.0 };
        let limit = if sign > 0.0 { hi } else { -lo };
        let mut prev = 0.0;
        let mut cur = h.min(limit);
        let mut fcur = if sign > 0.0 { fp } else { fm };
        loop {
            if cur >= limit {
                break;
            }
            let next = (cur * 2.0).min(limit);
            let fnext = phi(sign * next);
            if fnext >= fcur {
                cur = next;
                break;
            }
            prev = cur;
            cur = next;
            fcur = fnext;
        }
        let (x, y) = (sign * prev, sign * cur);
        a = x.min(y);
        b = x.max(y);
    }
    const R: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - R * (b - a);
    let mut x2 = a + R * (b - a);
    let mut f1 = phi(x1);
    let mut f2 = phi(x2);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - R * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + R * (b - a);
            f2 = phi(x2);
        }
    }
    let (t, v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if v < f0 {
        (t, v)
    } else {
        (0.0, f0)
    }
}
