use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use finsler_pl::complex::ComplexSpec;
use finsler_pl::gallery::{self, ConvexityProbe, GalleryInstance};
use finsler_pl::oracle::{build_graph, enumerate_geodesics, oracle_distance, uniqueness_scan, Region};
use finsler_pl::paths::{
    is_geodesic_path, local_distance, path_from_csv, path_from_json, path_to_csv, path_to_json, PathRecord, VertexPath,
};
use finsler_pl::saddle::{is_saddle_cone, is_saddle_surface, Mesh, SaddleConeSurface, SurfaceSpec};
use finsler_pl::shortening::{shorten_to_geodesic, uniqueness_radius, AdmissibleSequence};
use finsler_pl::{Complex, Point};
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{csv_table, Report};
use crate::ComplexArg;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_complex(cfg: &RunConfig, arg: &ComplexArg) -> Result<Arc<Complex>> {
    let spec = ComplexSpec::from_json(&read(&arg.complex)?)?;
    match arg.copies {
        None => Ok(Arc::new(spec.build_with(cfg.tolerances)?)),
        Some(n) => {
            let p = spec
                .build_periodic_with(cfg.tolerances)?
                .ok_or_else(|| anyhow!("--copies needs a periodic complex"))?;
            Ok(p.window(n)?)
        }
    }
}

fn numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| anyhow!("bad {what} {s:?}"))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        bail!("{what} needs {n} finite numbers, got {s:?}");
    }
    Ok(v)
}

/// `FACE:X,Y`.
fn parse_point(s: &str) -> Result<Point> {
    let (face, xy) = s.split_once(':').ok_or_else(|| anyhow!("point {s:?} is not FACE:X,Y"))?;
    let face = face.trim().parse().map_err(|_| anyhow!("bad face id in {s:?}"))?;
    let v = numbers(xy, 2, "point")?;
    Ok(Point::new(face, [v[0], v[1]]))
}

fn parse_bbox(s: &str) -> Result<[f64; 4]> {
    let v = numbers(s, 4, "box")?;
    Ok([v[0], v[1], v[2], v[3]])
}

fn read_points(path: &Path) -> Result<Vec<Point>> {
    let text = read(path)?;
    let is_csv = path.extension().is_some_and(|e| e == "csv") || text.trim_start().starts_with("index");
    Ok(if is_csv { path_from_csv(&text)? } else { path_from_json(&text)? })
}

fn bbox_around(complex: &Complex, a: &Point, b: &Point) -> Result<[f64; 4]> {
    complex.check_point(a)?;
    complex.check_point(b)?;
    let (p, q) = (a.coords, b.coords);
    Ok([p[0].min(q[0]) - 1.0, p[1].min(q[1]) - 1.0, p[0].max(q[0]) + 1.0, p[1].max(q[1]) + 1.0])
}

pub fn validate(cfg: &RunConfig, arg: &ComplexArg) -> Result<Report> {
    let spec = ComplexSpec::from_json(&read(&arg.complex)?)?;
    let report = spec.build_with(cfg.tolerances)?.validate();
    let mut pass = report.valid;
    let cover = match spec.build_periodic_with(cfg.tolerances)? {
        Some(p) => {
            let r = p.window(arg.copies.unwrap_or(2))?.validate();
            pass &= r.valid;
            Some(r)
        }
        None => None,
    };
    Report::new("validate", pass, json!({ "report": report, "cover": cover }))
}

pub fn distance(
    cfg: &RunConfig,
    arg: &ComplexArg,
    from: &str,
    to: &str,
    all: bool,
    oracle_h: Option<f64>,
    bbox: Option<&str>,
) -> Result<Report> {
    let complex = load_complex(cfg, arg)?;
    let (a, b) = (parse_point(from)?, parse_point(to)?);
    let (d, path) = local_distance(&complex, &a, &b, &cfg.search)?;
    let geodesics = if all {
        let list = enumerate_geodesics(&complex, &a, &b, &cfg.search, cfg.tolerances.metric)?;
        Some(json!({
            "truncated": list.truncated,
            "paths": list.paths.iter().map(PathRecord::new).collect::<Vec<_>>(),
        }))
    } else {
        None
    };
    let mut pass = true;
    let oracle = match oracle_h {
        Some(h) => {
            let region = Region::new(match bbox {
                Some(s) => parse_bbox(s)?,
                None => bbox_around(&complex, &a, &b)?,
            });
            let g = build_graph(&complex, &region, h, None)?;
            let r = oracle_distance(&complex, &g, &a, &b)?;
            let gap = r.distance_upper - d;
            let agree = gap >= -1e-9 && gap <= (0.01 * d).max(5.0 * h);
            pass &= agree;
            Some(json!({ "h": h, "distance_upper": r.distance_upper, "gap": gap, "agree": agree, "nodes": g.node_count() }))
        }
        None => None,
    };
    let result = json!({
        "from": a,
        "to": b,
        "distance": d,
        "path": PathRecord::new(&path),
        "geodesics": geodesics,
        "oracle": oracle,
    });
    Ok(Report::new("distance", pass, result)?.file("path.csv", path_to_csv(&path)))
}

pub fn shorten(
    cfg: &RunConfig,
    arg: &ComplexArg,
    points: Option<&str>,
    path: Option<&Path>,
    edges: usize,
    rho: Option<f64>,
) -> Result<Report> {
    let complex = load_complex(cfg, arg)?;
    let pts = match (points, path) {
        (Some(s), _) => s.split(';').filter(|t| !t.trim().is_empty()).map(parse_point).collect::<Result<Vec<_>>>()?,
        (None, Some(p)) => read_points(p)?,
        (None, None) => bail!("give --points or --path"),
    };
    let initial = VertexPath::from_points(&complex, &pts)?;
    let rho = match rho {
        Some(r) => r,
        None => {
            let verts = initial.vertices();
            let step = (verts.len() / 8).max(1);
            let r = verts
                .iter()
                .step_by(step)
                .map(|p| uniqueness_radius(&complex, p, &cfg.radius, &cfg.search).radius)
                .fold(f64::INFINITY, f64::min);
            if !(r > 0.0) {
                bail!("no positive uniqueness radius near the path; pass --rho");
            }
            r
        }
    };
    let seq = AdmissibleSequence::subdivide(&complex, &initial, edges, rho, &cfg.search)?;
    let out = shorten_to_geodesic(&complex, &seq, &cfg.search, &cfg.shorten)?;
    let limit = out.path();
    let check = is_geodesic_path(&complex, &limit, &cfg.search, 1e-5)?;
    let log = csv_table(
        &["iteration", "length", "max_edge", "energy", "displacement"],
        out.log.iter().map(|l| {
            vec![
                l.iteration.to_string(),
                l.length.to_string(),
                l.max_edge.to_string(),
                l.energy.to_string(),
                l.displacement.to_string(),
            ]
        }),
    );
    let result = json!({
        "rho": rho,
        "iterations": out.iterations,
        "initial_length": seq.length(),
        "length": out.sequence.length(),
        "max_edge": out.sequence.max_edge(),
        "energy": out.sequence.energy(),
        "geodesic": check,
        "path": PathRecord::new(&limit),
        "log": out.log,
    });
    Ok(Report::new("shorten", check.geodesic, result)?.file("path.csv", path_to_csv(&limit)).file("log.csv", log))
}

pub fn scan(cfg: &RunConfig, arg: &ComplexArg, radius: f64, pairs: usize, bbox: &str) -> Result<Report> {
    let complex = load_complex(cfg, arg)?;
    let region = Region::new(parse_bbox(bbox)?);
    let r = uniqueness_scan(&complex, &region, radius, pairs, cfg.seed, &cfg.search)?;
    Report::new("scan", r.ambiguous == 0, r)
}

pub fn oracle(
    cfg: &RunConfig,
    arg: &ComplexArg,
    from: &str,
    to: &str,
    h: f64,
    hop: Option<f64>,
    bbox: Option<&str>,
) -> Result<Report> {
    let complex = load_complex(cfg, arg)?;
    let (a, b) = (parse_point(from)?, parse_point(to)?);
    let region = Region::new(match bbox {
        Some(s) => parse_bbox(s)?,
        None => bbox_around(&complex, &a, &b)?,
    });
    let g = build_graph(&complex, &region, h, hop)?;
    let r = oracle_distance(&complex, &g, &a, &b)?;
    let result = json!({ "h": h, "nodes": g.node_count(), "edges": g.edge_count(), "oracle": r });
    Report::new("oracle", true, result)
}

pub fn saddle(_cfg: &RunConfig, surface: Option<&Path>, mesh: Option<&Path>) -> Result<Report> {
    if let Some(p) = surface {
        let spec: SurfaceSpec = serde_json::from_str(&read(p)?).context("surface JSON")?;
        let s = SaddleConeSurface::from_spec(&spec)?;
        let test = is_saddle_cone(&s);
        return Report::new("saddle", test.contains(), json!({ "saddle": test.contains(), "test": test }));
    }
    let path = mesh.ok_or_else(|| anyhow!("give --surface or --mesh"))?;
    let m: Mesh = serde_json::from_str(&read(path)?).context("mesh JSON")?;
    let vertices = is_saddle_surface(&m)?;
    let pass = vertices.iter().all(|v| v.saddle != Some(false));
    Report::new("saddle", pass, json!({ "saddle": pass, "vertices": vertices }))
}

struct Params(BTreeMap<String, f64>);

impl Params {
    fn parse(raw: &[String]) -> Result<Self> {
        let mut m = BTreeMap::new();
        for p in raw {
            let (k, v) = p.split_once('=').ok_or_else(|| anyhow!("parameter {p:?} is not KEY=VALUE"))?;
            let v: f64 = v.trim().parse().map_err(|_| anyhow!("parameter {k} needs a number, got {v:?}"))?;
            m.insert(k.trim().to_string(), v);
        }
        Ok(Self(m))
    }

    fn take(&mut self, key: &str, default: f64) -> f64 {
        self.0.remove(key).unwrap_or(default)
    }

    fn finish(self) -> Result<()> {
        match self.0.keys().next() {
            Some(k) => bail!("unknown parameter {k}"),
            None => Ok(()),
        }
    }
}

fn complex_json(inst: &GalleryInstance) -> String {
    let mut spec = inst.complex.to_spec();
    if let Some(p) = &inst.periodic {
        spec.periodic = Some(*p.deck());
    }
    spec.to_json() + "\n"
}

pub fn gallery(cfg: &RunConfig, name: &str, raw: &[String]) -> Result<Report> {
    let mut p = Params::parse(raw)?;
    let (inst, measurement, curves) = match name {
        "half-planes" => {
            let inst = gallery::build_glued_half_planes(p.take("beta_up", 0.5), p.take("beta_down", -0.5))?;
            let probe = ConvexityProbe {
                triangles: p.take("triangles", 200.0) as usize,
                seed: cfg.seed,
                ..ConvexityProbe::default()
            };
            p.finish()?;
            let r = gallery::measure_convexity_failure(&inst, &probe)?;
            let rows = r.convexity_violations.iter().map(|w| {
                vec![w.foot, w.center, w.step, w.values[0], w.values[1], w.values[2], w.margin]
                    .iter()
                    .map(f64::to_string)
                    .collect()
            });
            let csv = csv_table(&["foot", "center", "step", "below", "at", "above", "margin"], rows);
            (inst, serde_json::to_value(r)?, vec![("convexity.csv".to_string(), csv)])
        }
        "belt" => {
            let inst = gallery::build_belt(p.take("factor", 1.01), p.take("patch_angle", 0.3))?;
            let periods = p.take("periods", 10.0) as usize;
            let window = p.take("window", 400.0) as usize;
            let offset = p.take("offset", 0.05);
            p.finish()?;
            let r = gallery::measure_asymptotics(&inst, &[offset, 0.0], periods, window)?;
            let rows = r.tracks.iter().flat_map(|t| {
                t.deviations
                    .iter()
                    .enumerate()
                    .map(|(k, d)| vec![t.offset.to_string(), k.to_string(), d.to_string()])
                    .collect::<Vec<_>>()
            });
            let csv = csv_table(&["offset", "period", "deviation"], rows);
            (inst, serde_json::to_value(r)?, vec![("deviations.csv".to_string(), csv)])
        }
        "double-belt" => {
            let inst = gallery::build_double_belt(
                p.take("factor", 1.01),
                p.take("patch_angle", 0.3),
                p.take("copies", 3.0) as usize,
                p.take("bridge", 1.0),
            )?;
            p.finish()?;
            (inst, serde_json::Value::Null, vec![])
        }
        "flag" => {
            let inst = gallery::build_russian_flag(p.take("corner_sharpness", 0.3), p.take("width", 1.0))?;
            let x = p.take("x", 0.0);
            let (py, qy) = (p.take("p_y", 1.5), p.take("q_y", -1.5));
            let count = p.take("count", 21.0) as usize;
            p.finish()?;
            let r = gallery::geodesic_fan(&inst, [x, py], [x, qy], count)?;
            let rows = r
                .members
                .iter()
                .map(|m| vec![m.offset.to_string(), m.length.to_string(), m.geodesic.to_string()]);
            let csv = csv_table(&["offset", "length", "geodesic"], rows);
            (inst, serde_json::to_value(r)?, vec![("fan.csv".to_string(), csv)])
        }
        other => bail!("unknown gallery item {other:?}; expected half-planes, belt, double-belt or flag"),
    };
    let mut report = Report::new("gallery", true, json!({ "instance": inst.summary(), "measurement": measurement }))?
        .file("complex.json", complex_json(&inst));
    report = report.file("measurement.json", serde_json::to_string_pretty(&measurement)? + "\n");
    for (n, c) in curves {
        report = report.file(n, c);
    }
    Ok(report)
}

pub fn export(cfg: &RunConfig, arg: &ComplexArg, path: &Path, format: &str) -> Result<Report> {
    let complex = load_complex(cfg, arg)?;
    let vp = VertexPath::from_points(&complex, &read_points(path)?)?;
    let (name, text) = match format {
        "csv" => ("path.csv", path_to_csv(&vp)),
        _ => ("path.json", path_to_json(&vp) + "\n"),
    };
    let mut r = Report::new("export", true, PathRecord::new(&vp))?.file(name, text.clone());
    r.raw = Some(text);
    Ok(r)
}
