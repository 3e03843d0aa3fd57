use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use qgraph::evolution::{experiments, run, RunConfig, RunLog, RunStatus};
use qgraph::export::{plot_csv, spectrum_csv};
use qgraph::io::{graph_from_json, graph_to_json_pretty};
use qgraph::secular::{plot_samples, SecularEvaluator};
use qgraph::spectrum::{compute_spectrum, spectrum_for_count, ModeChoice, RootSearchOptions, Spectrum};
use qgraph::{Error, MetricGraph, ParameterBinding};
use serde_json::{json, Value};

use crate::prepare_graph;

/// Failure of a command. Invalid input exits with status 2, anything else
/// with status 1.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnboundParameter(_)
            | Error::InvalidGraph(_)
            | Error::Parse { .. }
            | Error::ZeroDegree
            | Error::NotRational
            | Error::Config(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Failed(format!("{}: {e}", path.display()))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Reads a graph file, or a fixture when given `fixture:<name>`.
pub fn load_graph(source: &str) -> Result<MetricGraph, CliError> {
    if let Some(name) = source.strip_prefix("fixture:") {
        return qgraph::fixtures::by_name(name).ok_or_else(|| CliError::Invalid(format!("unknown fixture {name:?}")));
    }
    Ok(graph_from_json(&read_text(Path::new(source))?)?)
}

pub struct SpectrumRequest {
    pub binding: ParameterBinding,
    pub k_max: Option<f64>,
    pub count: Option<usize>,
    pub mode: ModeChoice,
}

pub fn spectrum(g: &MetricGraph, req: &SpectrumRequest) -> Result<Spectrum, CliError> {
    let g = prepare_graph(g, &req.binding, false)?;
    let opts = RootSearchOptions::default();
    let spec = match (req.k_max, req.count) {
        (Some(k), _) => compute_spectrum(&g, req.mode, &opts.with_k_max(k))?,
        (None, Some(n)) => spectrum_for_count(&g, n, req.mode, &opts)?,
        (None, None) => compute_spectrum(&g, req.mode, &opts)?,
    };
    Ok(match req.count {
        Some(n) if req.k_max.is_none() => {
            let k = spec.k_prefix(n)?.last().copied().unwrap_or(0.0);
            spec.truncated(k)
        }
        _ => spec,
    })
}

pub fn spectrum_json(spec: &Spectrum) -> Value {
    let roots: Vec<Value> = spec
        .roots()
        .iter()
        .map(|r| json!({"k": r.k, "multiplicity": r.multiplicity, "lambda": r.lambda()}))
        .collect();
    json!({"mode": spec.mode(), "k_max": spec.k_max(), "roots": roots})
}

pub fn format_spectrum(spec: &Spectrum, json: bool) -> String {
    if json {
        format!("{}\n", serde_json::to_string_pretty(&spectrum_json(spec)).expect("values serialize"))
    } else {
        spectrum_csv(spec)
    }
}

/// `k,sigma_min,re_det,im_det` on a uniform grid. Zero-length edges are
/// contracted first.
pub fn plot_dk(g: &MetricGraph, binding: &ParameterBinding, k0: f64, k1: f64, n: usize) -> Result<String, CliError> {
    let g = prepare_graph(g, binding, true)?;
    let ev = SecularEvaluator::new(&g)?;
    Ok(plot_csv(&plot_samples(&ev, k0, k1, n)))
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let cfg = RunConfig::from_json(&read_text(path)?)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Writes `steps.jsonl`, `final_graph.json`, `k_trajectory.csv`,
/// `timings.csv` and `summary.json` into `dir`.
pub fn write_run(log: &RunLog, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    write_text(&dir.join("steps.jsonl"), &log.to_jsonl())?;
    write_text(&dir.join("final_graph.json"), &(graph_to_json_pretty(log.final_graph()) + "\n"))?;
    write_text(&dir.join("k_trajectory.csv"), &log.k_trajectory_csv())?;
    write_text(&dir.join("timings.csv"), &log.timings_csv())?;
    let summary = json!({
        "config": log.config,
        "initial": log.initial,
        "status": log.status,
        "steps": log.steps.len(),
        "phase_starts": log.phase_starts(),
        "final_score": log.steps.last().map(|s| s.score),
    });
    write_text(&dir.join("summary.json"), &(serde_json::to_string_pretty(&summary).expect("serializes") + "\n"))
}

pub fn evolve(cfg: RunConfig, out: &Path) -> Result<RunLog, CliError> {
    let log = run(cfg)?;
    write_run(&log, out)?;
    if let RunStatus::Aborted(reason) = &log.status {
        return Err(CliError::Failed(format!("run aborted after {} steps: {reason}", log.steps.len())));
    }
    Ok(log)
}

pub fn experiment_config(name: &str) -> Result<RunConfig, CliError> {
    experiments::by_name(name).ok_or_else(|| {
        CliError::Invalid(format!("unknown experiment {name:?}; known: {}", experiments::NAMES.join(", ")))
    })
}

/// Writes every built-in configuration as `<name>.json`.
pub fn export_configs(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    experiments::NAMES
        .iter()
        .map(|name| {
            let path = dir.join(format!("{name}.json"));
            write_text(&path, &(experiment_config(name)?.to_json_pretty() + "\n"))?;
            Ok(path)
        })
        .collect()
}

/// One-line description of a finished run.
pub fn run_summary(name: &str, log: &RunLog) -> String {
    let last = log.steps.last();
    let g = log.final_graph();
    format!(
        "{name}: {} steps, status {:?}, final score {}, final graph {} vertices / {} edges",
        log.steps.len(),
        log.status,
        last.map_or("n/a".into(), |s| format!("{:.6}", s.score)),
        g.vertex_count(),
        g.edge_count()
    )
}
