use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use charbox::atlas::{atlas_json, bt_atlas, default_samples, AtlasOptions, BTAtlasEntry};
use charbox::ode::Tolerances;
use charbox::report::{self, Analysis, AnalysisOptions, ReportError};
use charbox::system_model::PlanarSystem;

/// Box-dimension analysis of nilpotent singular points of planar polynomial systems.
#[derive(Parser, Debug)]
#[command(name = "charbox", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Truncation order K of the series (default: chosen from the leading exponents).
    #[arg(long = "order", global = true)]
    order: Option<u32>,
    /// Number of unit-time iterates per orbit.
    #[arg(long = "orbit-n", global = true, default_value_t = 2000)]
    orbit_n: usize,
    /// Starting abscissa of orbits and return maps (default 0.3; 0.2 for poincare, 0.05 for bt-atlas).
    #[arg(long, global = true, allow_hyphen_values = true)]
    x0: Option<f64>,
    /// Relative tolerance of the integrator.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Largest epsilon of the box-counting ladders (default: derived from the orbit).
    #[arg(long, global = true)]
    eps0: Option<f64>,
    /// Number of epsilon levels per ladder.
    #[arg(long = "eps-levels", global = true, default_value_t = 10)]
    eps_levels: usize,
    /// Directory for CSV sidecars (orbits, ladders, fits).
    #[arg(long = "csv-dir", global = true)]
    csv_dir: Option<PathBuf>,
    /// Emit compact single-line JSON instead of pretty-printed JSON.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Characteristic data and type of the singular point.
    Classify { file: PathBuf },
    /// Taylor expansion of the unit-time map and the characteristic map.
    Unitmap { file: PathBuf },
    /// Characteristic dimension and box dimensions along separatrices or node directions.
    Dimension { file: PathBuf },
    /// Return map on the characteristic curve of a focus and the cyclicity bound.
    Poincare {
        file: PathBuf,
        /// Number of returns in the sequence.
        #[arg(long = "returns", default_value_t = 300)]
        returns: usize,
    },
    /// Charts at infinity for x' = y, y' = a x^m + b x^n y.
    Infinity { file: PathBuf },
    /// Dimensions across the unfolding x' = y, y' = b1 + b2 x + x^2 - x y.
    BtAtlas {
        /// Parameter point `b1,b2`; repeatable. Default: one point per curve and region.
        #[arg(long = "point", allow_hyphen_values = true)]
        points: Vec<String>,
        /// Rectangular grid `b1min:b1max:n1,b2min:b2max:n2`.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Duration of the spiral trajectory on H, in linear periods.
        #[arg(long = "spiral-turns", default_value_t = 1000.0)]
        spiral_turns: f64,
    },
}

enum Failure {
    Input(anyhow::Error),
    Numerical(anyhow::Error),
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Input(_) => Failure::Input(e.into()),
            ReportError::Numerical(_) => Failure::Numerical(e.into()),
        }
    }
}

fn load(path: &Path) -> Result<PlanarSystem, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Input)?;
    PlanarSystem::from_json_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(Failure::Input)
}

fn write_csv(dir: &Path, files: &[(String, String)]) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, body) in files {
        let p = dir.join(name);
        fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn emit(v: &Value, compact: bool) {
    let text = if compact { serde_json::to_string(v) } else { serde_json::to_string_pretty(v) };
    // A closed pipe (`charbox ... | head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{}", text.unwrap_or_default());
}

fn parse_pair(s: &str) -> anyhow::Result<(f64, f64)> {
    let (a, b) = s.split_once(',').with_context(|| format!("expected `b1,b2`, got `{s}`"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn parse_grid(s: &str) -> anyhow::Result<Vec<(f64, f64)>> {
    let axis = |t: &str| -> anyhow::Result<Vec<f64>> {
        let parts: Vec<&str> = t.split(':').collect();
        anyhow::ensure!(parts.len() == 3, "grid axis must be `min:max:n`, got `{t}`");
        let (lo, hi, n): (f64, f64, usize) = (parts[0].parse()?, parts[1].parse()?, parts[2].parse()?);
        anyhow::ensure!(n >= 1, "grid axis needs at least one point");
        Ok((0..n).map(|k| if n == 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect())
    };
    let (a, b) = s.split_once(',').with_context(|| format!("expected `b1 axis,b2 axis`, got `{s}`"))?;
    let (b1s, b2s) = (axis(a)?, axis(b)?);
    Ok(b1s.iter().flat_map(|&x| b2s.iter().map(move |&y| (x, y))).collect())
}

fn atlas_csv(entries: &[BTAtlasEntry]) -> String {
    let mut s = String::from("b1,b2,label,set,method,estimate,prediction,discrepancy\n");
    for e in entries {
        for d in &e.dimensions {
            let r = &d.report;
            let p = r.prediction.as_ref().map_or(String::new(), |p| p.value.to_string());
            let disc = r.discrepancy.map_or(String::new(), |v| v.to_string());
            let method = serde_json::to_value(r.method).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
            s.push_str(&format!("{},{},{},\"{}\",{method},{},{p},{disc}\n", e.beta.0, e.beta.1, e.label.label(), d.set, r.estimate));
        }
    }
    s
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = &cli.common;
    let opts = AnalysisOptions {
        order: c.order,
        orbit_n: c.orbit_n,
        x0: c.x0,
        rtol: c.tol,
        eps0: c.eps0,
        eps_levels: c.eps_levels,
        ..Default::default()
    };
    let analysis: Analysis = match &cli.command {
        Command::Classify { file } => report::classify_report(&load(file)?, &opts)?,
        Command::Unitmap { file } => report::unitmap_report(&load(file)?, &opts)?,
        Command::Dimension { file } => report::dimension_report(&load(file)?, &opts)?,
        Command::Poincare { file, returns } => {
            report::poincare_report(&load(file)?, &AnalysisOptions { poincare_n: *returns, ..opts })?
        }
        Command::Infinity { file } => report::infinity_report(&load(file)?, &opts)?,
        Command::BtAtlas { points, grid, spiral_turns } => {
            let mut samples = Vec::new();
            for p in points {
                samples.push(parse_pair(p).map_err(Failure::Input)?);
            }
            if let Some(g) = grid {
                samples.extend(parse_grid(g).map_err(Failure::Input)?);
            }
            if samples.is_empty() {
                samples = default_samples();
            }
            let aopts = AtlasOptions {
                orbit_n: c.orbit_n,
                x0: c.x0.unwrap_or(0.05),
                tol: Tolerances::with_rtol(c.tol),
                spiral_turns: *spiral_turns,
                eps_levels: c.eps_levels,
                ..Default::default()
            };
            let entries = bt_atlas(&samples, &aopts);
            let report = serde_json::json!({
                "schema_version": report::SCHEMA_VERSION,
                "command": "bt-atlas",
                "entries": atlas_json(&entries),
            });
            Analysis { report, csv: vec![("atlas.csv".into(), atlas_csv(&entries))] }
        }
    };
    if let Some(dir) = &c.csv_dir {
        write_csv(dir, &analysis.csv).map_err(Failure::Input)?;
    }
    emit(&analysis.report, c.json);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
