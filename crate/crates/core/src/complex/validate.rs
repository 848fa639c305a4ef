use serde::{Deserialize, Serialize};

use super::{Complex, FaceId, Point};
use crate::geom::{self, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueKind {
    EdgeMismatch,
    NonIsometric,
    UnflaggedUnbounded,
    CycleInconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub kind: IssueKind,
    pub message: String,
    pub gluing: Option<usize>,
    pub face: Option<FaceId>,
    pub worst_direction: Option<Vec2>,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub faces: usize,
    pub gluings: usize,
    pub vertex_classes: usize,
    pub locally_finite: bool,
    pub smooth: bool,
    pub issues: Vec<Issue>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn summary(&self) -> String {
        if self.valid {
            return "valid".into();
        }
        self.issues.iter().map(|i| i.message.as_str()).collect::<Vec<_>>().join("; ")
    }
}

impl Complex {
    /// Check gluing bijectivity and isometry, face flags and chart-change cycles.
    pub fn validate(&self) -> ValidationReport {
        let tol = self.tol.structural;
        let mut issues = Vec::new();
        let mut warnings = Vec::new();

        for f in &self.faces {
            if !f.is_bounded() && !f.declared_unbounded() {
                issues.push(Issue {
                    kind: IssueKind::UnflaggedUnbounded,
                    message: format!("face {} is unbounded but not flagged as unbounded", f.id),
                    gluing: None,
                    face: Some(f.id),
                    worst_direction: None,
                    defect: f64::INFINITY,
                });
            }
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for k in 0..64 {
                let a = std::f64::consts::PI * k as f64 / 64.0;
                let v = f.norm.value(&[a.cos(), a.sin()]);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi / lo > 10.0 {
                warnings.push(format!("face {}: norm is ill-conditioned (max/min on unit circle {:.3e})", f.id, hi / lo));
            }
        }

        for (gi, g) in self.gluings.iter().enumerate() {
            let ea = self.faces[g.face_a].edge(g.sub_a);
            let eb = self.faces[g.face_b].edge(g.sub_b);
            let md = geom::mat_vec(&g.matrix, ea.dir);
            let o = g.apply(ea.origin);
            let scale = 1.0 + o[0].abs().max(o[1].abs()) + ea.origin[0].abs().max(ea.origin[1].abs());
            let skew = geom::cross(md, eb.dir).abs() / geom::len(md);
            let off = eb.excess(o).abs() / scale;
            if skew > tol || off > tol {
                issues.push(Issue {
                    kind: IssueKind::EdgeMismatch,
                    message: format!(
                        "gluing {gi}: edge ({}, {}) does not map onto the line of edge ({}, {})",
                        g.face_a, g.sub_a, g.face_b, g.sub_b
                    ),
                    gluing: Some(gi),
                    face: None,
                    worst_direction: None,
                    defect: skew.max(off),
                });
                continue;
            }
            let alpha = geom::dot(md, eb.dir);
            let beta = eb.param(o);
            let (mut lo, mut hi) = (alpha * ea.lo + beta, alpha * ea.hi + beta);
            if alpha < 0.0 {
                std::mem::swap(&mut lo, &mut hi);
            }
            let end_gap = |x: f64, y: f64| {
                if x.is_infinite() || y.is_infinite() {
                    if x == y {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    (x - y).abs() / (1.0 + x.abs().max(y.abs()))
                }
            };
            let gap = end_gap(lo, eb.lo).max(end_gap(hi, eb.hi));
            if gap > tol {
                issues.push(Issue {
                    kind: IssueKind::EdgeMismatch,
                    message: format!(
                        "gluing {gi}: edge ({}, {}) is not mapped onto edge ({}, {}) bijectively (extent gap {gap:.3e})",
                        g.face_a, g.sub_a, g.face_b, g.sub_b
                    ),
                    gluing: Some(gi),
                    face: None,
                    worst_direction: None,
                    defect: gap,
                });
                continue;
            }
            let na = &self.faces[g.face_a].norm;
            let nb = &self.faces[g.face_b].norm;
            let mut worst = (0.0, ea.dir);
            for sign in [1.0, -1.0] {
                let d = geom::scale(ea.dir, sign);
                let la = na.value(&d);
                let lb = nb.value(&geom::scale(md, sign));
                let r = (la - lb).abs() / la;
                if r > worst.0 {
                    worst = (r, d);
                }
            }
            if worst.0 > tol {
                issues.push(Issue {
                    kind: IssueKind::NonIsometric,
                    message: format!(
                        "gluing {gi}: not an isometry; worst direction ({}, {}) has relative length defect {:.3e}",
                        worst.1[0], worst.1[1], worst.0
                    ),
                    gluing: Some(gi),
                    face: None,
                    worst_direction: Some(worst.1),
                    defect: worst.0,
                });
            }
            let m = &g.matrix;
            let sv = {
                let a = m.iter().map(|x| x * x).sum::<f64>();
                let d = geom::det(m).abs();
                let disc = (a * a - 4.0 * d * d).max(0.0).sqrt();
                (((a + disc) / 2.0).sqrt(), ((a - disc) / 2.0).max(0.0).sqrt())
            };
            if sv.0 > 1e6 * sv.1 {
                warnings.push(format!("gluing {gi}: ill-conditioned matrix"));
            }
        }

        // Interior edge points only: corners may legitimately be identified
        // with other corners of the same face.
        if issues.is_empty() {
            let mut worst = (0.0f64, 0usize, 0usize);
            for f in &self.faces {
                for (ei, e) in f.edges().iter().enumerate() {
                    for s in edge_samples(e.lo, e.hi) {
                        let (reps, defect) = self.closure(&Point::new(f.id, e.point(s)));
                        let mut d = defect;
                        for (i, a) in reps.iter().enumerate() {
                            for b in &reps[i + 1..] {
                                if a.face != b.face {
                                    continue;
                                }
                                let fa = &self.faces[a.face];
                                let shared = fa
                                    .edges_at(a.coords, 1e-9)
                                    .iter()
                                    .any(|x| fa.edges_at(b.coords, 1e-9).contains(x));
                                if shared {
                                    d = d.max(geom::dist(a.coords, b.coords));
                                }
                            }
                        }
                        if d > worst.0 {
                            worst = (d, f.id, ei);
                        }
                    }
                }
            }
            if worst.0 > tol * 10.0 {
                issues.push(Issue {
                    kind: IssueKind::CycleInconsistent,
                    message: format!(
                        "chart changes around edge ({}, {}) do not compose to the identity (defect {:.3e})",
                        worst.1, worst.2, worst.0
                    ),
                    gluing: None,
                    face: Some(worst.1),
                    worst_direction: None,
                    defect: worst.0,
                });
            }
        }

        ValidationReport {
            valid: issues.is_empty(),
            faces: self.faces.len(),
            gluings: self.gluings.len(),
            vertex_classes: self.vertices.len(),
            locally_finite: true,
            smooth: self.is_smooth(),
            issues,
            warnings,
        }
    }
}

fn edge_samples(lo: f64, hi: f64) -> Vec<f64> {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (1..4).map(|k| lo + (hi - lo) * k as f64 / 4.0).collect(),
        (true, false) => vec![lo + 0.5, lo + 2.0],
        (false, true) => vec![hi - 0.5, hi - 2.0],
        (false, false) => vec![-1.0, 0.0, 1.0],
    }
}
