//! Named example spaces and the experiments run on them.

mod measure;
#[cfg(test)]
mod tests;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use serde::Serialize;

use crate::complex::{Complex, Face, Gluing, HalfPlane, PeriodicComplex};
use crate::error::{Error, Result};
use crate::norms::{verify_norm_seeded, Norm};

pub use measure::{
    geodesic_fan, measure_asymptotics, measure_convexity_failure, AsymptoticsReport, BusemannWitness, ConvexityProbe,
    ConvexityReport, ConvexityWitness, FanMember, FanReport, Track,
};

/// A built example: the complex, its parameters and what it is meant to show.
#[derive(Debug, Clone)]
pub struct GalleryInstance {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub complex: Arc<Complex>,
    /// The periodic structure when the complex is a fundamental domain.
    pub periodic: Option<PeriodicComplex>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

/// Parameters and notes, for reports.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceSummary {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
    pub faces: usize,
    pub smooth: bool,
}

impl GalleryInstance {
    fn new(name: &str, params: &[(&str, f64)], complex: Complex, notes: &[&str]) -> Result<Self> {
        let report = complex.validate();
        if !report.valid {
            return Err(Error::Validation(report.summary()));
        }
        Ok(Self {
            name: name.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            complex: Arc::new(complex),
            periodic: None,
            notes: notes.iter().map(|s| s.to_string()).collect(),
            warnings: report.warnings,
        })
    }

    pub fn summary(&self) -> InstanceSummary {
        InstanceSummary {
            name: self.name.clone(),
            params: self.params.clone(),
            notes: self.notes.clone(),
            warnings: self.warnings.clone(),
            faces: self.complex.faces().len(),
            smooth: self.complex.is_smooth(),
        }
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }
}

fn sheared(beta: f64) -> Result<Norm> {
    if !(beta.abs() < 1.0) {
        return Err(Error::Input(format!(
            "x^2 + 2*beta*x*y + y^2 is not positive definite for beta = {beta}"
        )));
    }
    Norm::ellipsoidal(2, vec![1.0, beta, beta, 1.0])
}

/// Upper and lower half-planes with norms `x^2 + 2 beta x y + y^2`, glued
/// along the x-axis where both restrict to `|x|`.
pub fn build_glued_half_planes(beta_up: f64, beta_down: f64) -> Result<GalleryInstance> {
    let (up, down) = (sheared(beta_up)?, sheared(beta_down)?);
    let faces = vec![
        Face::new(0, vec![HalfPlane { normal: [0.0, -1.0], offset: 0.0 }], up, true)?,
        Face::new(1, vec![HalfPlane { normal: [0.0, 1.0], offset: 0.0 }], down, true)?,
    ];
    let complex = Complex::new(faces, vec![Gluing::identity(0, 0, 1, 0)])?;
    GalleryInstance::new(
        "half-planes",
        &[("beta_up", beta_up), ("beta_down", beta_down)],
        complex,
        &["two half-planes whose norms agree on horizontal vectors but have different tangents at (1,0)"],
    )
}

/// Bottom and top quadrilaterals of the belt's fundamental domain, from a
/// rectangle `[-1,1] x [-2,2]` cut along `y = x` with the bottom side
/// stretched to `[-factor, factor]`.
fn belt_faces(factor: f64, patch_angle: f64, seed: u64) -> Result<(Face, Face)> {
    let f = factor;
    let bottom = Face::polygon(0, &[[-f, -2.0], [f, -2.0], [1.0, 1.0], [-1.0, -1.0]], Norm::euclidean(2))?;
    let stretched = Norm::ellipsoidal(2, vec![f * f, 0.0, 0.0, 1.0])?;
    let top_norm = Norm::cone_patched(stretched, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2], patch_angle, 1.0)?;
    let report = verify_norm_seeded(&top_norm, 4000, 1e-9, seed);
    if !report.convex || !report.strictly_convex {
        return Err(Error::Construction(format!(
            "the patched norm is not strictly convex for factor {factor} and patch angle {patch_angle}; try a smaller patch angle"
        )));
    }
    let top = Face::polygon(1, &[[-1.0, -1.0], [1.0, 1.0], [1.0, 2.0], [-1.0, 2.0]], top_norm)?;
    Ok((bottom, top))
}

/// Largest patch half-angle allowed: the patch must stay clear of the
/// near-vertical directions the belt experiments follow.
pub const MAX_PATCH_ANGLE: f64 = 0.6;

fn check_belt_params(factor: f64, patch_angle: f64) -> Result<()> {
    if !(factor >= 1.0) || !factor.is_finite() {
        return Err(Error::Input(format!("belt factor must be at least 1, got {factor}")));
    }
    if !(patch_angle > 0.0 && patch_angle <= MAX_PATCH_ANGLE) {
        return Err(Error::Input(format!(
            "patch angle must lie in (0, {MAX_PATCH_ANGLE}], got {patch_angle}"
        )));
    }
    Ok(())
}

/// The belt: a fundamental domain whose top side is glued to the next copy's
/// stretched bottom side. The top face carries the norm `sqrt(f^2 x^2 + y^2)`
/// patched near the diagonal so the gluing along `y = x` is isometric; vertical
/// lengths are unchanged, so the line `x = 0` stays a geodesic.
pub fn build_belt(factor: f64, patch_angle: f64) -> Result<GalleryInstance> {
    check_belt_params(factor, patch_angle)?;
    let (bottom, top) = belt_faces(factor, patch_angle, 0xbe17)?;
    let base = Complex::new(vec![bottom, top], vec![Gluing::identity(0, 2, 1, 0)])?;
    let deck = Gluing {
        face_a: 1,
        sub_a: 2,
        face_b: 0,
        sub_b: 0,
        matrix: [factor, 0.0, 0.0, 1.0],
        offset: [0.0, -4.0],
    };
    let periodic = PeriodicComplex::new(base.clone(), deck)?;
    let window = periodic.window(2)?;
    let report = window.validate();
    if !report.valid {
        return Err(Error::Validation(report.summary()));
    }
    let mut inst = GalleryInstance::new(
        "belt",
        &[("factor", factor), ("patch_angle", patch_angle)],
        base,
        &[
            "fundamental domain of a periodic strip; copies are stacked vertically by the deck gluing",
            "geodesics near x = 0 approach it exponentially in one direction",
        ],
    )?;
    inst.periodic = Some(periodic);
    Ok(inst)
}

/// Two belt windows of `copies` copies each, joined by a rectangle of height
/// `bridge` attached along the top side of the middle copy of each.
pub fn build_double_belt(factor: f64, patch_angle: f64, copies: usize, bridge: f64) -> Result<GalleryInstance> {
    check_belt_params(factor, patch_angle)?;
    if copies == 0 || !(bridge > 0.0) {
        return Err(Error::Input("double belt needs at least one copy and a positive bridge height".into()));
    }
    let single = build_belt(factor, patch_angle)?;
    let window = single.periodic.as_ref().expect("belt is periodic").window(copies)?;
    let n = window.faces().len();
    let mut faces = Vec::with_capacity(2 * n + 1);
    let mut gluings = Vec::new();
    for shift in [0, n] {
        for f in window.faces() {
            let mut f = f.clone();
            f.id += shift;
            faces.push(f);
        }
        for g in window.gluings() {
            let mut g = *g;
            g.face_a += shift;
            g.face_b += shift;
            gluings.push(g);
        }
    }
    let stretched = Norm::ellipsoidal(2, vec![factor * factor, 0.0, 0.0, 1.0])?;
    let r = 2 * n;
    faces.push(Face::polygon(r, &[[-1.0, 0.0], [1.0, 0.0], [1.0, bridge], [-1.0, bridge]], stretched)?);
    let top = 2 * (copies / 2) + 1;
    let id = [1.0, 0.0, 0.0, 1.0];
    gluings.push(Gluing { face_a: r, sub_a: 0, face_b: top, sub_b: 2, matrix: id, offset: [0.0, 2.0] });
    gluings.push(Gluing { face_a: r, sub_a: 2, face_b: top + n, sub_b: 2, matrix: id, offset: [0.0, 2.0 - bridge] });
    let complex = Complex::new(faces, gluings)?;
    GalleryInstance::new(
        "double-belt",
        &[("factor", factor), ("patch_angle", patch_angle), ("copies", copies as f64), ("bridge", bridge)],
        complex,
        &["two belt windows joined by a rectangle; the asymptotic pair measurement is not implemented"],
    )
}

/// Three horizontal strips: Euclidean above and below, and in the middle the
/// maximum of two sheared ellipses, which has a corner at the vertical direction.
pub fn build_russian_flag(corner_sharpness: f64, width: f64) -> Result<GalleryInstance> {
    let b = corner_sharpness;
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::Input(format!("corner sharpness must lie in (0, 1), got {b}")));
    }
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::Input(format!("middle strip width must be positive, got {width}")));
    }
    let mid = Norm::max_of(vec![sheared(b)?, sheared(-b)?])?;
    let horizontal = mid.eval(&[1.0, 0.0])?;
    if (horizontal - 1.0).abs() > 1e-12 {
        return Err(Error::Construction(format!("middle norm gives {horizontal} on horizontals, not 1")));
    }
    let hw = 0.5 * width;
    let e = Norm::euclidean(2);
    let faces = vec![
        Face::new(0, vec![HalfPlane { normal: [0.0, -1.0], offset: -hw }], e.clone(), true)?,
        Face::new(
            1,
            vec![HalfPlane { normal: [0.0, 1.0], offset: hw }, HalfPlane { normal: [0.0, -1.0], offset: hw }],
            mid,
            true,
        )?,
        Face::new(2, vec![HalfPlane { normal: [0.0, 1.0], offset: -hw }], e, true)?,
    ];
    let complex = Complex::new(faces, vec![Gluing::identity(0, 0, 1, 0), Gluing::identity(1, 1, 2, 0)])?;
    GalleryInstance::new(
        "flag",
        &[("corner_sharpness", b), ("width", width)],
        complex,
        &["the middle norm has a corner at the vertical direction, so a whole fan of broken lines are geodesics"],
    )
}
