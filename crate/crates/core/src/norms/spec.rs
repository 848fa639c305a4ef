use serde::{Deserialize, Serialize};

use super::{ConePatch, Norm};
use crate::error::{Error, Result};

/// JSON description of a norm. Matrices are nested row-major arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum NormSpec {
    EuclideanScaled {
        dim: usize,
        #[serde(default = "one")]
        scale: f64,
    },
    Ellipsoidal {
        matrix: Vec<Vec<f64>>,
    },
    Lp {
        dim: usize,
        p: f64,
    },
    MaxOfEllipsoidal {
        parts: Vec<NormSpec>,
    },
    ConePatched {
        base: Box<NormSpec>,
        direction: Vec<f64>,
        half_angle: f64,
        target: f64,
    },
    LinearPullback {
        base: Box<NormSpec>,
        matrix: Vec<Vec<f64>>,
    },
}

fn one() -> f64 {
    1.0
}

fn flatten(rows: &[Vec<f64>]) -> Result<(usize, usize, Vec<f64>)> {
    let r = rows.len();
    let c = rows.first().map(|x| x.len()).unwrap_or(0);
    if r == 0 || c == 0 || rows.iter().any(|x| x.len() != c) {
        return Err(Error::Input("matrix must be a non-empty rectangular array".into()));
    }
    Ok((r, c, rows.iter().flatten().cloned().collect()))
}

fn nest(flat: &[f64], cols: usize) -> Vec<Vec<f64>> {
    flat.chunks(cols).map(|c| c.to_vec()).collect()
}

impl TryFrom<NormSpec> for Norm {
    type Error = Error;

    fn try_from(spec: NormSpec) -> Result<Self> {
        match spec {
            NormSpec::EuclideanScaled { dim, scale } => Norm::euclidean_scaled(dim, scale),
            NormSpec::Ellipsoidal { matrix } => {
                let (r, c, q) = flatten(&matrix)?;
                if r != c {
                    return Err(Error::Input("ellipsoidal matrix must be square".into()));
                }
                Norm::ellipsoidal(r, q)
            }
            NormSpec::Lp { dim, p } => Norm::lp(dim, p),
            NormSpec::MaxOfEllipsoidal { parts } => {
                Norm::max_of(parts.into_iter().map(Norm::try_from).collect::<Result<_>>()?)
            }
            NormSpec::ConePatched {
                base,
                direction,
                half_angle,
                target,
            } => Norm::cone_patched(Norm::try_from(*base)?, &direction, half_angle, target),
            NormSpec::LinearPullback { base, matrix } => {
                let base = Norm::try_from(*base)?;
                let (r, c, m) = flatten(&matrix)?;
                if r != base.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: base.dim(),
                        got: r,
                    });
                }
                Norm::pullback(base, c, m)
            }
        }
    }
}

impl From<Norm> for NormSpec {
    fn from(n: Norm) -> Self {
        match n {
            Norm::EuclideanScaled { dim, scale } => NormSpec::EuclideanScaled { dim, scale },
            Norm::Ellipsoidal { dim, q } => NormSpec::Ellipsoidal {
                matrix: nest(&q, dim),
            },
            Norm::Lp { dim, p } => NormSpec::Lp { dim, p },
            Norm::MaxOfEllipsoidal { parts, .. } => NormSpec::MaxOfEllipsoidal {
                parts: parts.into_iter().map(NormSpec::from).collect(),
            },
            Norm::ConePatched(p) => {
                let ConePatch {
                    base,
                    direction,
                    half_angle,
                    target,
                    ..
                } = *p;
                NormSpec::ConePatched {
                    base: Box::new(base.into()),
                    direction,
                    half_angle,
                    target,
                }
            }
            Norm::Pullback { dim, base, map } => NormSpec::LinearPullback {
                base: Box::new((*base).into()),
                matrix: nest(&map, dim),
            },
        }
    }
}
