mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Overrides;

#[derive(Parser, Debug)]
#[command(name = "finsler-pl", version, about = "Geodesics and curvature checks on polyhedral Finsler spaces")]
#[command(allow_negative_numbers = true)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// JSON run configuration; defaults to $FINSLER_PL_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for the JSON report and CSV curves.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Metric tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ComplexArg {
    /// Complex JSON.
    #[arg(long)]
    complex: PathBuf,
    /// For periodic complexes: work in a window of this many copies.
    #[arg(long)]
    copies: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a complex for consistency.
    Validate {
        #[command(flatten)]
        complex: ComplexArg,
    },
    /// Local distance and shortest path between two points.
    Distance {
        #[command(flatten)]
        complex: ComplexArg,
        /// Point as FACE:X,Y.
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// List every geodesic within the search window.
        #[arg(long)]
        all: bool,
        /// Compare with the lattice oracle.
        #[arg(long)]
        check_oracle: bool,
        #[arg(long, default_value_t = 0.02)]
        h: f64,
        /// Oracle box XMIN,YMIN,XMAX,YMAX; defaults to the endpoints' box grown by 1.
        #[arg(long, allow_hyphen_values = true)]
        bbox: Option<String>,
    },
    /// Iterated midpoint shortening of a broken line.
    Shorten {
        #[command(flatten)]
        complex: ComplexArg,
        /// Vertices as FACE:X,Y;FACE:X,Y;...
        #[arg(long, conflicts_with = "path")]
        points: Option<String>,
        /// Path file (JSON record or CSV).
        #[arg(long)]
        path: Option<PathBuf>,
        /// Number of edges after subdivision.
        #[arg(long, default_value_t = 16)]
        edges: usize,
        /// Uniqueness radius; estimated at the vertices when omitted.
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Sample nearby pairs and look for non-unique geodesics.
    Scan {
        #[command(flatten)]
        complex: ComplexArg,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value = "-1,-1,1,1", allow_hyphen_values = true)]
        bbox: String,
    },
    /// Lattice upper bound for the distance.
    Oracle {
        #[command(flatten)]
        complex: ComplexArg,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 0.02)]
        h: f64,
        #[arg(long)]
        hop: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        bbox: Option<String>,
    },
    /// Saddle test for a cone surface or a triangulated mesh.
    Saddle {
        #[arg(long, conflicts_with = "mesh", required_unless_present = "mesh")]
        surface: Option<PathBuf>,
        #[arg(long)]
        mesh: Option<PathBuf>,
    },
    /// Build a named example and run its experiment.
    Gallery {
        /// half-planes | belt | double-belt | flag
        name: String,
        /// Parameter as KEY=VALUE; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Convert a path between JSON and CSV.
    Export {
        #[command(flatten)]
        complex: ComplexArg,
        #[arg(long)]
        path: PathBuf,
        #[arg(long, value_parser = ["json", "csv"])]
        format: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = Overrides {
        config: cli.global.config,
        seed: cli.global.seed,
        threads: cli.global.threads,
        out: cli.global.out,
        verbose: cli.global.verbose,
        metric_tol: cli.global.tol,
    };
    let cfg = match config::load(&flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let run = match cli.command {
        Command::Validate { complex } => commands::validate(&cfg, &complex),
        Command::Distance { complex, from, to, all, check_oracle, h, bbox } => {
            commands::distance(&cfg, &complex, &from, &to, all, check_oracle.then_some(h), bbox.as_deref())
        }
        Command::Shorten { complex, points, path, edges, rho } => {
            commands::shorten(&cfg, &complex, points.as_deref(), path.as_deref(), edges, rho)
        }
        Command::Scan { complex, radius, pairs, bbox } => commands::scan(&cfg, &complex, radius, pairs, &bbox),
        Command::Oracle { complex, from, to, h, hop, bbox } => {
            commands::oracle(&cfg, &complex, &from, &to, h, hop, bbox.as_deref())
        }
        Command::Saddle { surface, mesh } => commands::saddle(&cfg, surface.as_deref(), mesh.as_deref()),
        Command::Gallery { name, params } => commands::gallery(&cfg, &name, &params),
        Command::Export { complex, path, format } => commands::export(&cfg, &complex, &path, &format),
    };
    match run.and_then(|report| output::emit(&cfg, report)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
