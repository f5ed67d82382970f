use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use splitpoint::casestudy::{load_labeled_csv, resample_experiment, CaseScale, CaseStudyConfig};
use splitpoint::error::{Error, Result};
use splitpoint::figures::{run_figure, FigureId, Profile};
use splitpoint::montecarlo::config::default_p_grid;
use splitpoint::montecarlo::{simulate_risk, with_workers, ExperimentConfig};
use splitpoint::report::{
    circle_panels, curve_panels, render_svg, splitsets_panels, table_panels, unix_now, CsvReport, RiskTable, RunManifest,
    ANALYTIC_KINDS,
};
use splitpoint::risk::Measure;
use splitpoint::supervised::EstimatorKind;
use splitpoint::tree::{simulate_circle, simulate_splitting_sets, CircleConfig, SplitSetsConfig};

/// Split-point estimators for decision-tree thresholds: closed-form risks,
/// Monte Carlo risk curves, multi-split experiments and a resampling case
/// study.
#[derive(Debug, Parser)]
#[command(name = "splitpoint", version)]
struct Cli {
    /// Worker threads for simulations (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Master seed; overrides any seed in a config file.
    #[arg(long, global = true, env = "SPLITPOINT_SEED")]
    seed: Option<u64>,

    /// Write a JSON run manifest to this path.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate closed-form risks.
    Risk(RiskArgs),
    /// Run a simulation described by a TOML config file.
    Simulate(SimulateArgs),
    /// Reproduce a figure's data bundle.
    Figure(FigureArgs),
    /// Multi-split experiment on dyadic splitting sets.
    Splitsets(SplitsetsArgs),
    /// Tree misclassification of a circle on the unit square.
    Circle(CircleArgs),
    /// Subsample-and-score protocol on a labeled CSV.
    Casestudy(CasestudyArgs),
    /// Re-run the command recorded in a manifest.
    Replay {
        manifest: PathBuf,
    },
}

#[derive(Debug, Args)]
struct RiskArgs {
    /// Estimators (comma separated); defaults to every estimator with a closed form.
    #[arg(long, value_delimiter = ',')]
    kind: Vec<EstimatorKind>,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 10, 20, 100])]
    n: Vec<usize>,
    /// Split positions; defaults to 0.01, 0.02, ..., 0.99.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [Measure::Mae])]
    measure: Vec<Measure>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `reps` from the config.
    #[arg(long, value_parser = parse_count)]
    reps: Option<usize>,
    /// Overrides `out` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `plot` from the config.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FigureArgs {
    id: FigureId,
    #[arg(long, default_value = "desk")]
    profile: Profile,
    /// Output directory.
    #[arg(long, default_value = "figures")]
    out: PathBuf,
    /// Also write SVG plots.
    #[arg(long)]
    plot: bool,
}

#[derive(Debug, Args)]
struct SplitsetsArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0u32, 1, 2, 3])]
    orders: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = [10usize, 20, 100])]
    n: Vec<usize>,
    #[arg(long, value_parser = parse_count, default_value = "1e5")]
    reps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CircleArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [10usize, 20, 50, 100, 250, 500, 750, 1000])]
    n: Vec<usize>,
    #[arg(long, value_parser = parse_count, default_value = "1e5")]
    reps: usize,
    /// Evaluation grid points per side.
    #[arg(long, default_value_t = 400)]
    grid: usize,
    #[arg(long, default_value_t = 8)]
    max_depth: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CasestudyArgs {
    #[arg(long)]
    data: PathBuf,
    /// Numeric predictor column.
    #[arg(long)]
    value: String,
    /// Binary label column.
    #[arg(long)]
    label: String,
    /// Label value of the positive (high) class.
    #[arg(long)]
    positive: String,
    #[arg(long, value_delimiter = ',', default_values_t = [10usize, 20, 100, 1000])]
    n: Vec<usize>,
    #[arg(long, value_parser = parse_count, default_value = "1e5")]
    reps: usize,
    #[arg(long, value_delimiter = ',', default_values_t = CaseScale::ALL)]
    scales: Vec<CaseScale>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Accepts integers and float notation such as `1e5`.
fn parse_count(s: &str) -> std::result::Result<usize, String> {
    if let Ok(v) = s.parse::<usize>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= 1e15 => Ok(v as usize),
        _ => Err(format!("`{s}` is not a non-negative whole number")),
    }
}

/// What a command produced, for the manifest.
struct Outcome {
    config: serde_json::Value,
    seed: u64,
    outputs: Vec<PathBuf>,
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

/// Writes `text` to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, text: &str, outputs: &mut Vec<PathBuf>) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            std::fs::write(p, text).map_err(|e| Error::io(p, e))?;
            outputs.push(p.to_path_buf());
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    Ok(())
}

fn cmd_risk(a: &RiskArgs) -> Result<Outcome> {
    let kinds = if a.kind.is_empty() { ANALYTIC_KINDS.to_vec() } else { a.kind.clone() };
    let ps = if a.p.is_empty() { default_p_grid() } else { a.p.clone() };
    let table = RiskTable::compute(&kinds, &a.n, &ps, &a.measure)?;
    let mut outputs = Vec::new();
    emit(a.out.as_deref(), &table.csv_string()?, &mut outputs)?;
    if let Some(plot) = &a.plot {
        emit(Some(plot), &render_svg("closed-form risk", &table_panels(&table), 4), &mut outputs)?;
    }
    let config = serde_json::json!({ "kind": kinds, "n": a.n, "p": ps, "measure": a.measure });
    Ok(Outcome { config, seed: 0, outputs })
}

/// Simulation config: a risk-curve grid, or a tree experiment selected with
/// `experiment = "splitsets" | "circle"`.
enum SimulationSpec {
    Risk(ExperimentConfig),
    Splitsets(SplitSetsConfig),
    Circle(CircleConfig),
}

fn parse_simulation(path: &Path) -> Result<SimulationSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let at = |e: toml::de::Error| Error::config(path.display().to_string(), e.message().to_string());
    let mut table: toml::Table = toml::from_str(&text).map_err(at)?;
    let kind = match table.remove("experiment") {
        None => "risk".to_string(),
        Some(toml::Value::String(s)) => s,
        Some(other) => return Err(Error::config("experiment", format!("expected a string, got {other}"))),
    };
    let rest = toml::Value::Table(table);
    match kind.as_str() {
        "risk" => {
            let cfg: ExperimentConfig = rest.try_into().map_err(at)?;
            cfg.validate()?;
            Ok(SimulationSpec::Risk(cfg))
        }
        "splitsets" => Ok(SimulationSpec::Splitsets(rest.try_into().map_err(at)?)),
        "circle" => Ok(SimulationSpec::Circle(rest.try_into().map_err(at)?)),
        other => Err(Error::config("experiment", format!("unknown experiment `{other}`; expected risk, splitsets or circle"))),
    }
}

fn cmd_simulate(a: &SimulateArgs, seed: Option<u64>) -> Result<Outcome> {
    let mut outputs = Vec::new();
    let spec = parse_simulation(&a.config)?;
    match spec {
        SimulationSpec::Risk(mut cfg) => {
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.reps = a.reps.unwrap_or(cfg.reps);
            if a.out.is_some() {
                cfg.out.clone_from(&a.out);
            }
            if a.plot.is_some() {
                cfg.plot.clone_from(&a.plot);
            }
            let curve = simulate_risk(&cfg)?;
            if curve.degenerate_fits > 0 {
                eprintln!("note: {} replicates redrawn after a zero-spread normal fit", curve.degenerate_fits);
            }
            emit(cfg.out.as_deref(), &curve.csv_string()?, &mut outputs)?;
            if let Some(plot) = &cfg.plot {
                emit(Some(plot), &render_svg("simulated MAE", &curve_panels(&curve), 4), &mut outputs)?;
            }
            Ok(Outcome { config: json(&cfg), seed: cfg.seed, outputs })
        }
        SimulationSpec::Splitsets(mut cfg) => {
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.reps = a.reps.unwrap_or(cfg.reps);
            let report = simulate_splitting_sets(&cfg)?;
            emit(a.out.as_deref(), &report.csv_string()?, &mut outputs)?;
            if let Some(plot) = &a.plot {
                emit(Some(plot), &render_svg("splitting sets", &splitsets_panels(&report), 2), &mut outputs)?;
            }
            Ok(Outcome { config: json(&cfg), seed: cfg.seed, outputs })
        }
        SimulationSpec::Circle(mut cfg) => {
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.reps = a.reps.unwrap_or(cfg.reps);
            let report = simulate_circle(&cfg)?;
            emit(a.out.as_deref(), &report.csv_string()?, &mut outputs)?;
            if let Some(plot) = &a.plot {
                emit(Some(plot), &render_svg("circle", &circle_panels(&report), 2), &mut outputs)?;
            }
            Ok(Outcome { config: json(&cfg), seed: cfg.seed, outputs })
        }
    }
}

fn cmd_figure(a: &FigureArgs, seed: Option<u64>) -> Result<Outcome> {
    let seed = seed.unwrap_or(0);
    let bundle = run_figure(a.id, a.profile, seed, a.plot)?;
    let mut outputs = Vec::new();
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    for f in &bundle.files {
        emit(Some(&a.out.join(&f.name)), &f.contents, &mut outputs)?;
    }
    eprintln!("wrote {} file(s) to {}", outputs.len(), a.out.display());
    Ok(Outcome { config: json(&bundle.config), seed, outputs })
}

fn cmd_splitsets(a: &SplitsetsArgs, seed: Option<u64>) -> Result<Outcome> {
    let cfg = SplitSetsConfig { orders: a.orders.clone(), n: a.n.clone(), reps: a.reps, seed: seed.unwrap_or(0), ..Default::default() };
    let report = simulate_splitting_sets(&cfg)?;
    let mut outputs = Vec::new();
    emit(a.out.as_deref(), &report.csv_string()?, &mut outputs)?;
    if let Some(plot) = &a.plot {
        emit(Some(plot), &render_svg("splitting sets", &splitsets_panels(&report), 2), &mut outputs)?;
    }
    Ok(Outcome { config: json(&cfg), seed: cfg.seed, outputs })
}

fn cmd_circle(a: &CircleArgs, seed: Option<u64>) -> Result<Outcome> {
    let cfg = CircleConfig { n: a.n.clone(), reps: a.reps, seed: seed.unwrap_or(0), grid: a.grid, max_depth: a.max_depth };
    let report = simulate_circle(&cfg)?;
    let mut outputs = Vec::new();
    emit(a.out.as_deref(), &report.csv_string()?, &mut outputs)?;
    if let Some(plot) = &a.plot {
        emit(Some(plot), &render_svg("circle", &circle_panels(&report), 2), &mut outputs)?;
    }
    Ok(Outcome { config: json(&cfg), seed: cfg.seed, outputs })
}

fn cmd_casestudy(a: &CasestudyArgs, seed: Option<u64>) -> Result<Outcome> {
    let data = load_labeled_csv(&a.data, &a.value, &a.label, &a.positive)?;
    if data.dropped > 0 {
        eprintln!("note: dropped {} row(s) with a missing value or label", data.dropped);
    }
    let cfg = CaseStudyConfig { n: a.n.clone(), reps: a.reps, seed: seed.unwrap_or(0), scales: a.scales.clone() };
    let report = resample_experiment(&data, &cfg)?;
    let retries: u64 = report.rows.iter().map(|r| r.retries).sum();
    if retries > 0 {
        eprintln!("note: redrew {retries} subsample(s) without a usable split");
    }
    let mut outputs = Vec::new();
    emit(a.out.as_deref(), &report.csv_string()?, &mut outputs)?;
    let config = serde_json::json!({ "data": a.data, "rows": data.len(), "dropped": data.dropped, "experiment": cfg });
    Ok(Outcome { config, seed: cfg.seed, outputs })
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::Risk(_) => "risk",
        Command::Simulate(_) => "simulate",
        Command::Figure(_) => "figure",
        Command::Splitsets(_) => "splitsets",
        Command::Circle(_) => "circle",
        Command::Casestudy(_) => "casestudy",
        Command::Replay { .. } => "replay",
    }
}

fn run(args: Vec<String>) -> Result<()> {
    let cli = Cli::try_parse_from(std::iter::once("splitpoint".to_string()).chain(args.iter().cloned()))
        .map_err(|e| {
            let _ = e.print();
            if e.use_stderr() {
                Error::Usage("invalid command line".into())
            } else {
                // help and version requests
                std::process::exit(0);
            }
        })?;
    if let Command::Replay { manifest } = &cli.command {
        let m = RunManifest::load(manifest)?;
        return run(m.args);
    }
    let started = unix_now();
    let seed = cli.seed;
    let outcome = with_workers(cli.workers, || match &cli.command {
        Command::Risk(a) => cmd_risk(a),
        Command::Simulate(a) => cmd_simulate(a, seed),
        Command::Figure(a) => cmd_figure(a, seed),
        Command::Splitsets(a) => cmd_splitsets(a, seed),
        Command::Circle(a) => cmd_circle(a, seed),
        Command::Casestudy(a) => cmd_casestudy(a, seed),
        Command::Replay { .. } => unreachable!("handled above"),
    })??;
    let figure_dir = match &cli.command {
        Command::Figure(a) => Some(a.out.join("manifest.json")),
        _ => None,
    };
    for path in cli.manifest.iter().chain(figure_dir.iter()) {
        let mut replay_args = args.clone();
        strip_manifest_flag(&mut replay_args);
        RunManifest {
            subcommand: name(&cli.command).to_string(),
            args: replay_args,
            config: outcome.config.clone(),
            seed: outcome.seed,
            workers: cli.workers,
            started,
            finished: unix_now(),
            outputs: outcome.outputs.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
        .save(path)?;
    }
    Ok(())
}

/// Drops `--manifest PATH` so a replay does not overwrite the manifest.
fn strip_manifest_flag(args: &mut Vec<String>) {
    let mut i = 0;
    while i < args.len() {
        if args[i] == "--manifest" {
            args.drain(i..(i + 2).min(args.len()));
        } else if args[i].starts_with("--manifest=") {
            args.remove(i);
        } else {
            i += 1;
        }
    }
}

fn main() -> ExitCode {
    match run(std::env::args().skip(1).collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(&e, Error::Usage(m) if m == "invalid command line") {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
