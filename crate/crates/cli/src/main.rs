//! `vph`: verbose persistence diagrams, matching distances and seeded
//! growing-window experiments from the command line.
//!
//! Exit codes: 0 success, 2 usage/config/parse/domain/io error, 3 an
//! experiment verdict failed, 4 simplex budget exceeded.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use vph_core::filtration::{build_filtered_complex, parse_kappa};
use vph_core::homology::{verbose_diagram_over, verbose_diagrams, Field, VerboseDiagram};
use vph_core::io::{float_or_inf, parse_float, read_cloud, read_diagrams, write_diagrams};
use vph_core::stochastic::{run_experiment, with_threads, Experiment, ExperimentConfig, Status};
use vph_core::{matching_distance, Error};

const EXIT_USAGE: u8 = 2;
const EXIT_FAILED: u8 = 3;
const EXIT_RESOURCE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "vph",
    version,
    about = "Verbose persistence diagrams for κ-filtrations on point clouds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute verbose diagrams of a point cloud.
    Diagram {
        /// CSV with header `x1,...,xN[,mark]`.
        cloud: PathBuf,
        /// Filtration function: rips, rips-marked, cech, cech-marked or shift(<kappa>,k,t).
        #[arg(long, default_value = "rips")]
        kappa: String,
        /// Emit only this degree (defaults to every degree up to --qmax).
        #[arg(long)]
        q: Option<usize>,
        /// Largest degree computed; simplices up to dimension qmax + 1 are built.
        /// Defaults to --q, or 1.
        #[arg(long)]
        qmax: Option<usize>,
        /// Truncation threshold, a number or `inf`.
        #[arg(long, default_value = "inf", value_parser = threshold)]
        tmax: f64,
        /// Coefficient field characteristic: 2 or an odd prime.
        #[arg(long, default_value_t = 2)]
        field: u32,
        /// Output directory for `diagrams/diagram.csv` and `summary.json`;
        /// without it the diagram CSV goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Matching distance between the degree-q parts of two diagram CSVs.
    Dist {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        q: usize,
    },
    /// Run a seeded experiment: slln, mass, clt, support or stability.
    Experiment {
        name: String,
        /// JSON experiment configuration.
        #[arg(long)]
        config: PathBuf,
        /// Seed for every random draw; overrides a seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for `report.json`, tables, `measures/` and `diagrams/`.
        #[arg(long)]
        out: PathBuf,
    },
}

fn threshold(s: &str) -> Result<f64, String> {
    parse_float(s)
        .filter(|t| *t >= 0.0)
        .ok_or_else(|| format!("`{s}` is not a threshold >= 0 or `inf`"))
}

#[derive(Serialize)]
struct DegreeCount {
    q: usize,
    cardinality: usize,
}

#[derive(Serialize)]
struct Summary {
    kappa: String,
    field: u32,
    #[serde(with = "float_or_inf")]
    t_max: f64,
    q_max: usize,
    points: usize,
    simplices: usize,
    cardinalities: Vec<DegreeCount>,
}

#[derive(Serialize)]
struct DistOutput {
    q: usize,
    #[serde(with = "float_or_inf")]
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<(usize, usize)>>,
}

enum Outcome {
    Done,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(EXIT_FAILED),
        Err(e) => {
            eprintln!("vph: {e}");
            ExitCode::from(match e {
                Error::Budget { .. } => EXIT_RESOURCE,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn run(cmd: Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Diagram {
            cloud,
            kappa,
            q,
            qmax,
            tmax,
            field,
            out,
        } => {
            cmd_diagram(&cloud, &kappa, q, qmax, tmax, field, out.as_deref())?;
            Ok(Outcome::Done)
        }
        Command::Dist { a, b, q } => {
            cmd_dist(&a, &b, q)?;
            Ok(Outcome::Done)
        }
        Command::Experiment {
            name,
            config,
            seed,
            out,
        } => cmd_experiment(&name, &config, seed, &out),
    }
}

fn open(path: &Path) -> Result<fs::File, Error> {
    fs::File::open(path).map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Error> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn cmd_diagram(
    path: &Path,
    kappa: &str,
    q: Option<usize>,
    qmax: Option<usize>,
    t_max: f64,
    field: u32,
    out: Option<&Path>,
) -> Result<(), Error> {
    let cloud = read_cloud(open(path)?)?;
    let kappa_fn = parse_kappa(kappa)?;
    let f = Field::new(field)?;
    let q_max = qmax.or(q).unwrap_or(1);
    if let Some(q) = q {
        if q > q_max {
            return Err(Error::Domain(format!("--q {q} exceeds --qmax {q_max}")));
        }
    }
    let fc = build_filtered_complex(&cloud, kappa_fn.as_ref(), q_max, t_max)?;
    let diagrams: Vec<VerboseDiagram> = match q {
        Some(q) => vec![verbose_diagram_over(&fc, q, f)?],
        None => verbose_diagrams(&fc, f)?,
    };
    let summary = Summary {
        kappa: kappa_fn.name(),
        field,
        t_max,
        q_max,
        points: cloud.len(),
        simplices: fc.len(),
        cardinalities: diagrams
            .iter()
            .map(|d| DegreeCount {
                q: d.q(),
                cardinality: d.len(),
            })
            .collect(),
    };
    match out {
        Some(dir) => {
            fs::create_dir_all(dir.join("diagrams"))?;
            let mut csv = Vec::new();
            write_diagrams(&mut csv, &diagrams)?;
            fs::write(dir.join("diagrams").join("diagram.csv"), csv)?;
            fs::write(dir.join("summary.json"), to_json(&summary)?)?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_diagrams(&mut lock, &diagrams)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn cmd_dist(a: &Path, b: &Path, q: usize) -> Result<(), Error> {
    let pick = |path: &Path| -> Result<VerboseDiagram, Error> {
        read_diagrams(open(path)?)?
            .remove(&q)
            .ok_or_else(|| Error::Domain(format!("{} has no degree-{q} points", path.display())))
    };
    let (da, db) = (pick(a)?, pick(b)?);
    let r = matching_distance(&da, &db)?;
    let out = DistOutput {
        q,
        value: r.value,
        witness: r.witness,
    };
    print!("{}", to_json(&out)?);
    Ok(())
}

/// Worker count from `VPH_THREADS` (unset or 0 = one per core).
fn threads() -> Result<usize, Error> {
    match std::env::var("VPH_THREADS") {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(vec![format!("VPH_THREADS: `{v}` is not a nonnegative integer")])),
    }
}

fn cmd_experiment(name: &str, config: &Path, seed: Option<u64>, out: &Path) -> Result<Outcome, Error> {
    let experiment: Experiment = name.parse()?;
    let text = fs::read_to_string(config)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", config.display()))))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if seed.is_some() {
        cfg.seed = seed;
    }
    let output = with_threads(threads()?, || run_experiment(experiment, &cfg))??;
    output.write_to_dir(out)?;
    let report = &output.report;
    for v in &report.verdicts {
        eprintln!(
            "{experiment}: {:<30} {:?} (observed {}, threshold {})",
            v.name, v.status, v.observed, v.threshold
        );
    }
    for w in &report.warnings {
        eprintln!("{experiment}: warning: {w}");
    }
    Ok(match report.status {
        Status::Fail => Outcome::Failed,
        Status::Pass | Status::Inconclusive => Outcome::Done,
    })
}
