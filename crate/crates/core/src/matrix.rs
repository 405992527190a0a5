//! Protocol × TTL × seed sweeps.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::engine::run_scenario;
use crate::error::{Error, Result};
use crate::metrics::{aggregate, emit_csv, emit_svg_chart, AggregateRow, CellKey, Metric, RunReport};
use crate::routing::ProtocolKind;
use crate::sources::{ContactSequence, WorkloadSequence};
use crate::types::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Cell {
    pub protocol: ProtocolKind,
    pub ttl: SimTime,
    pub seed: u64,
}

/// Restricts a sweep to a subset of the configured values.
#[derive(Debug, Clone, Default)]
pub struct MatrixFilter {
    pub protocols: Option<Vec<ProtocolKind>>,
    pub ttls: Option<Vec<SimTime>>,
    pub seeds: Option<Vec<u64>>,
}

type Inputs = std::result::Result<(ContactSequence, WorkloadSequence), String>;

#[derive(Debug, Clone)]
pub struct MatrixOutcome {
    pub reports: Vec<(Cell, RunReport)>,
    pub failures: Vec<(Cell, String)>,
    pub rows: Vec<AggregateRow>,
}

fn pick<T: Copy + PartialEq>(all: &[T], only: &Option<Vec<T>>) -> Vec<T> {
    match only {
        Some(keep) => all.iter().copied().filter(|v| keep.contains(v)).collect(),
        None => all.to_vec(),
    }
}

/// Every cell of the sweep, in a fixed order.
pub fn cells(cfg: &ScenarioConfig, filter: &MatrixFilter) -> Vec<Cell> {
    let mut out = Vec::new();
    for protocol in pick(&cfg.protocols, &filter.protocols) {
        for ttl in pick(&cfg.ttls, &filter.ttls) {
            for seed in pick(&cfg.seeds, &filter.seeds) {
                out.push(Cell { protocol, ttl, seed });
            }
        }
    }
    out
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

/// Runs every cell on a pool of `jobs` threads (all cores when `None`).
/// Failed cells are collected and the rest still run.
pub fn run_matrix(cfg: &ScenarioConfig, filter: &MatrixFilter, jobs: Option<usize>) -> Result<MatrixOutcome> {
    let cells = cells(cfg, filter);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::config("jobs", e.to_string()))?;
    let mut seeds: Vec<u64> = cells.iter().map(|c| c.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    let params = cfg.protocol_params();

    let results: Vec<(Cell, std::result::Result<RunReport, String>)> = pool.install(|| {
        let inputs: Vec<(u64, Inputs)> = seeds
            .par_iter()
            .map(|&seed| {
                let built = cfg.contacts(seed).and_then(|c| {
                    let w = cfg.workload(seed, &c)?;
                    Ok((c, w))
                });
                (seed, built.map_err(|e| e.to_string()))
            })
            .collect();
        cells
            .par_iter()
            .map(|&cell| {
                let (_, input) = inputs.iter().find(|(s, _)| *s == cell.seed).expect("seed prepared");
                let outcome = match input {
                    Err(e) => Err(e.clone()),
                    Ok((contacts, workload)) => {
                        let engine = cfg.engine_config(cell.ttl, contacts);
                        catch_unwind(AssertUnwindSafe(|| {
                            run_scenario(engine, contacts, workload, cell.protocol, &params)
                        }))
                        .map_err(panic_message)
                        .and_then(|r| r.map_err(|e| e.to_string()))
                    }
                };
                (cell, outcome)
            })
            .collect()
    });

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (cell, r) in results {
        match r {
            Ok(rep) => reports.push((cell, rep)),
            Err(e) => failures.push((cell, e)),
        }
    }
    let keyed: Vec<(CellKey, RunReport)> = reports
        .iter()
        .map(|(c, r)| {
            (
                CellKey {
                    protocol: c.protocol.name().to_string(),
                    ttl: c.ttl,
                },
                r.clone(),
            )
        })
        .collect();
    Ok(MatrixOutcome {
        rows: aggregate(&keyed),
        reports,
        failures,
    })
}

#[derive(Serialize)]
struct Manifest<'a> {
    scenario: &'a str,
    tool_version: &'a str,
    config_sha256: String,
    generated_unix_s: u64,
    cells: usize,
    failed_cells: usize,
    failures: Vec<FailureEntry<'a>>,
}

#[derive(Serialize)]
struct FailureEntry<'a> {
    protocol: &'a str,
    ttl_s: SimTime,
    seed: u64,
    error: &'a str,
}

pub fn config_hash(cfg: &ScenarioConfig) -> String {
    hex::encode(Sha256::digest(cfg.to_toml().as_bytes()))
}

/// Writes `aggregate.csv`, one SVG chart per metric and `manifest.toml`
/// into `dir`; returns the paths written.
pub fn write_outputs(cfg: &ScenarioConfig, outcome: &MatrixOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    if !outcome.rows.is_empty() {
        let csv = dir.join("aggregate.csv");
        emit_csv(&outcome.rows, &csv)?;
        written.push(csv);
        for metric in Metric::ALL {
            let svg = dir.join(format!("{metric}.svg"));
            emit_svg_chart(&outcome.rows, metric, &svg)?;
            written.push(svg);
        }
    }
    let manifest = Manifest {
        scenario: &cfg.name,
        tool_version: env!("CARGO_PKG_VERSION"),
        config_sha256: config_hash(cfg),
        generated_unix_s: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        cells: outcome.reports.len() + outcome.failures.len(),
        failed_cells: outcome.failures.len(),
        failures: outcome
            .failures
            .iter()
            .map(|(c, e)| FailureEntry {
                protocol: c.protocol.name(),
                ttl_s: c.ttl,
                seed: c.seed,
                error: e,
            })
            .collect(),
    };
    let path = dir.join("manifest.toml");
    let text = toml::to_string(&manifest).expect("manifest is serializable");
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}
