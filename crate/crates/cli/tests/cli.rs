use std::path::Path;
use std::process::{Command, Output};

use finsler_pl::saddle::SaddleConeSurface;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_finsler-pl"));
    c.env_remove("FINSLER_PL_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Writes a gallery complex into `dir` and returns the path of its JSON.
fn gallery(dir: &Path, name: &str, extra: &[&str]) -> std::path::PathBuf {
    let out = dir.join(name);
    let mut args = vec!["gallery", name, "--out", p(&out)];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    out.join("complex.json")
}

#[test]
fn validate_reports_schema_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let c = gallery(dir.path(), "half-planes", &["--param", "triangles=0"]);
    let o = run(&["validate", "--complex", p(&c)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema"], "finsler-pl/1");
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["result"]["report"]["valid"], true);
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("broken.json");
    std::fs::write(&f, "{\"faces\": 3}").unwrap();
    assert_eq!(run(&["validate", "--complex", p(&f)]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--complex", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["gallery", "flag", "--param", "bogus=1"]).status.code(), Some(2));
}

#[test]
fn distance_agrees_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let c = gallery(dir.path(), "half-planes", &["--param", "triangles=0"]);
    let o = run(&[
        "distance", "--complex", p(&c), "--from", "0:-0.5,0.7", "--to", "1:0.6,-0.4", "--check-oracle", "--h", "0.02",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert_eq!(v["result"]["oracle"]["agree"], true);
    assert!(v["result"]["distance"].as_f64().unwrap() > 0.0);
}

#[test]
fn flag_scan_reports_ambiguity_as_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let c = gallery(dir.path(), "flag", &[]);
    let o = run(&["scan", "--complex", p(&c), "--radius", "3", "--pairs", "12", "--bbox", "-0.5,-1,0.5,1", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["verdict"], "fail");
    assert!(v["result"]["ambiguous"].as_u64().unwrap() > 0);
    assert!(dir.path().join("flag/fan.csv").exists());
}

#[test]
fn output_does_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let read = |t: &str| {
        let out = dir.path().join(t);
        let o = run(&["gallery", "half-planes", "--param", "triangles=30", "--threads", t, "--out", p(&out)]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(out.join("report.json")).unwrap()
    };
    assert_eq!(read("1"), read("8"));
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let c = gallery(dir.path(), "half-planes", &["--param", "triangles=0"]);
    let d = dir.path().join("d");
    let o = run(&["distance", "--complex", p(&c), "--from", "0:-1,1", "--to", "1:1,-1", "--out", p(&d)]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(d.join("path.csv")).unwrap();
    let o = run(&["export", "--complex", p(&c), "--path", p(&d.join("path.csv")), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let j = dir.path().join("path.json");
    std::fs::write(&j, &o.stdout).unwrap();
    let o = run(&["export", "--complex", p(&c), "--path", p(&j), "--format", "csv"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), csv);
    assert!(!csv.contains('\r'));
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let c = gallery(dir.path(), "half-planes", &["--param", "triangles=0"]);
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, "{\"seed\": 99}").unwrap();
    let seed = |extra: &[&str]| {
        let mut args = vec!["validate", "--complex", p(&c)];
        args.extend_from_slice(extra);
        let o = bin().env("FINSLER_PL_CONFIG", &cfg).args(&args).output().unwrap();
        json(&o)["seed"].as_u64().unwrap()
    };
    assert_eq!(seed(&[]), 99);
    assert_eq!(seed(&["--seed", "5"]), 5);
    assert_eq!(json(&run(&["validate", "--complex", p(&c)]))["seed"], 7);
}

#[test]
fn saddle_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("flat.json");
    std::fs::write(&f, serde_json::to_string(&SaddleConeSurface::flat().to_spec()).unwrap()).unwrap();
    let o = run(&["saddle", "--surface", p(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["result"]["saddle"], true);
    // A convex pyramid tip is not a saddle.
    let mesh = r#"{"vertices": [[0,0,1],[1,0,0],[0,1,0],[-1,0,0],[0,-1,0]],
        "triangles": [[0,1,2],[0,2,3],[0,3,4],[0,4,1]]}"#;
    let m = dir.path().join("mesh.json");
    std::fs::write(&m, mesh).unwrap();
    let o = run(&["saddle", "--mesh", p(&m)]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn shorten_reaches_a_geodesic() {
    let dir = tempfile::tempdir().unwrap();
    let c = gallery(dir.path(), "half-planes", &["--param", "triangles=0"]);
    let o = run(&["shorten", "--complex", p(&c), "--points", "0:-1,1;0:1,0;1:1,-1", "--edges", "8", "--rho", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!(v["result"]["length"].as_f64().unwrap() < v["result"]["initial_length"].as_f64().unwrap());
}
