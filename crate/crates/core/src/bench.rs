//! Benchmark sweeps: manifests, parallel runs and class-level reports.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{parse_vrptw, read_instance, transform, Instance, TransformOptions};
use crate::scalar::Scalar;
use crate::search::{run, SearchConfig};
use crate::solution::{validate, write_solution, SolutionMeta};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("reference file {path}: {message}")]
    Reference { path: PathBuf, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceEntry {
    /// Benchmark file in Solomon layout, transformed with the settings below.
    #[serde(default)]
    pub solomon: Option<PathBuf>,
    /// Ready-made instance file.
    #[serde(default)]
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub customers: Option<usize>,
    #[serde(default)]
    pub ns: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub truncate_distances: bool,
}

impl InstanceEntry {
    pub fn solomon(path: impl Into<PathBuf>, customers: Option<usize>, ns: f64) -> Self {
        Self {
            solomon: Some(path.into()),
            file: None,
            customers,
            ns: Some(ns),
            alpha: None,
            beta: None,
            truncate_distances: false,
        }
    }

    fn label(&self) -> String {
        self.solomon
            .as_ref()
            .or(self.file.as_ref())
            .map(|p| p.display().to_string())
            .unwrap_or_default()
    }

    pub fn load<S: Scalar>(&self, base: &Path) -> Result<Instance<S>, String> {
        match (&self.solomon, &self.file) {
            (Some(p), None) => {
                let path = base.join(p);
                let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                let raw = parse_vrptw(&text).map_err(|e| format!("{}: {e}", path.display()))?;
                let defaults = TransformOptions::default();
                let opts = TransformOptions {
                    ns: self.ns.unwrap_or(defaults.ns),
                    alpha: self.alpha.unwrap_or(defaults.alpha),
                    beta: self.beta.unwrap_or(defaults.beta),
                    customers: self.customers,
                    truncate_distances: self.truncate_distances,
                    ..defaults
                };
                transform(&raw, &opts).map_err(|e| format!("{}: {e}", path.display()))
            }
            (None, Some(p)) => {
                let path = base.join(p);
                let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                read_instance(&text).map_err(|e| format!("{}: {e}", path.display()))
            }
            _ => Err("entry needs exactly one of `solomon` or `file`".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub name: Option<String>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub workers: Option<usize>,
    /// Reference class values (CSV with size, class, sync and final columns).
    #[serde(default)]
    pub reference: Option<PathBuf>,
    /// Where solution files are written, if anywhere.
    #[serde(default)]
    pub solutions: Option<PathBuf>,
    #[serde(default)]
    pub config: SearchConfig,
    #[serde(rename = "instance")]
    pub instances: Vec<InstanceEntry>,
}

impl Manifest {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        let m: Self = toml::from_str(text).map_err(|e| BenchError::Manifest(e.to_string()))?;
        if m.seeds.is_empty() {
            return Err(BenchError::Manifest("no seeds".into()));
        }
        m.config.check().map_err(|e| BenchError::Manifest(e.to_string()))?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        Self::from_toml(&fs::read_to_string(path).map_err(io_err(path))?)
    }
}

/// Benchmark class of a source file name: R1, R2, C1, C2, RC1 or RC2.
pub fn class_of(source: &str) -> String {
    let letters: String = source.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
    let digit = source[letters.len()..].chars().next().filter(|c| c.is_ascii_digit());
    match digit {
        Some(d) => format!("{}{d}", letters.to_ascii_uppercase()),
        None => letters.to_ascii_uppercase(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetailRow {
    pub instance: String,
    pub class: String,
    pub size: usize,
    pub sync: usize,
    pub seed: u64,
    pub initial: Option<f64>,
    #[serde(rename = "final")]
    pub final_cost: Option<f64>,
    pub runtime: Option<f64>,
    pub feasible: bool,
    /// Why the row has no result.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub size: usize,
    pub class: String,
    pub sync: usize,
    pub runs: usize,
    pub initial: f64,
    #[serde(rename = "final")]
    pub final_cost: f64,
    pub runtime: f64,
    pub imp_pct: f64,
    pub reference: Option<f64>,
    pub gap_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub name: String,
    pub seeds: Vec<u64>,
    pub details: Vec<DetailRow>,
    pub classes: Vec<ClassRow>,
}

pub type Reference = BTreeMap<(usize, String, usize), f64>;

#[derive(Debug, Deserialize)]
struct ReferenceRecord {
    size: usize,
    class: String,
    sync: usize,
    #[serde(rename = "final")]
    final_cost: f64,
}

pub fn read_reference(path: &Path) -> Result<Reference, BenchError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_reference(&text).map_err(|e| BenchError::Reference {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn parse_reference(text: &str) -> Result<Reference, csv::Error> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Reference::new();
    for rec in rdr.deserialize::<ReferenceRecord>() {
        let r = rec?;
        out.insert((r.size, r.class, r.sync), r.final_cost);
    }
    Ok(out)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Class means over all runs with a result, in (size, sync, class) order.
pub fn aggregate(details: &[DetailRow], reference: &Reference) -> Vec<ClassRow> {
    let mut groups: BTreeMap<(usize, usize, String), Vec<&DetailRow>> = BTreeMap::new();
    for d in details.iter().filter(|d| d.final_cost.is_some() && d.initial.is_some()) {
        groups.entry((d.size, d.sync, d.class.clone())).or_default().push(d);
    }
    groups
        .into_iter()
        .map(|((size, sync, class), rows)| {
            let initial = mean(&rows.iter().filter_map(|r| r.initial).collect::<Vec<_>>());
            let final_cost = mean(&rows.iter().filter_map(|r| r.final_cost).collect::<Vec<_>>());
            let runtime = mean(&rows.iter().map(|r| r.runtime.unwrap_or(0.0)).collect::<Vec<_>>());
            let reference = reference.get(&(size, class.clone(), sync)).copied();
            ClassRow {
                size,
                class,
                sync,
                runs: rows.len(),
                initial,
                final_cost,
                runtime,
                imp_pct: if initial > 0.0 { 100.0 * (initial - final_cost) / initial } else { 0.0 },
                reference,
                gap_pct: reference.map(|r| 100.0 * (final_cost - r) / r),
            }
        })
        .collect()
}

/// Runs every (instance, seed) pair of the manifest. Paths in the manifest
/// are relative to `base`. `progress` is called after each finished run.
pub fn run_bench(
    manifest: &Manifest,
    base: &Path,
    workers: Option<usize>,
    progress: &(dyn Fn(&DetailRow) + Sync),
) -> Result<BenchReport, BenchError> {
    let reference = match &manifest.reference {
        Some(p) => read_reference(&base.join(p))?,
        None => Reference::new(),
    };
    let loaded: Vec<Result<Instance<f64>, String>> = manifest.instances.iter().map(|e| e.load(base)).collect();
    let jobs: Vec<(usize, u64)> = (0..loaded.len())
        .flat_map(|i| manifest.seeds.iter().map(move |&s| (i, s)))
        .collect();
    if let Some(dir) = &manifest.solutions {
        let dir = base.join(dir);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    }
    let results: Mutex<Vec<Option<DetailRow>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    let n_workers = workers.or(manifest.workers).unwrap_or(1).max(1).min(jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..n_workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= jobs.len() {
                    break;
                }
                let (i, seed) = jobs[k];
                let row = run_one(manifest, base, &manifest.instances[i], &loaded[i], seed);
                progress(&row);
                results.lock().expect("no worker panicked")[k] = Some(row);
            });
        }
    });
    let details: Vec<DetailRow> = results
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect();
    let classes = aggregate(&details, &reference);
    Ok(BenchReport {
        name: manifest.name.clone().unwrap_or_else(|| "bench".into()),
        seeds: manifest.seeds.clone(),
        details,
        classes,
    })
}

fn run_one(manifest: &Manifest, base: &Path, entry: &InstanceEntry, inst: &Result<Instance<f64>, String>, seed: u64) -> DetailRow {
    let inst = match inst {
        Ok(i) => i,
        Err(e) => {
            return DetailRow {
                instance: entry.label(),
                class: String::new(),
                size: 0,
                sync: 0,
                seed,
                initial: None,
                final_cost: None,
                runtime: None,
                feasible: false,
                error: Some(e.clone()),
            }
        }
    };
    let source = inst.provenance().map_or_else(|| inst.name().to_string(), |p| p.source.clone());
    let mut row = DetailRow {
        instance: inst.name().to_string(),
        class: class_of(&source),
        size: inst.customer_count(),
        sync: inst.special_count(),
        seed,
        initial: None,
        final_cost: None,
        runtime: None,
        feasible: false,
        error: None,
    };
    let cfg = SearchConfig {
        seed,
        ..manifest.config.clone()
    };
    let start = Instant::now();
    match run(inst, &cfg) {
        Ok(res) => {
            row.runtime = Some(start.elapsed().as_secs_f64());
            row.initial = Some(res.initial.cost);
            row.final_cost = Some(res.best.cost);
            row.feasible = validate(inst, &res.best).is_empty();
            if let Some(dir) = &manifest.solutions {
                let path = base.join(dir).join(format!("{}-s{seed}.sol.toml", inst.name()));
                let meta = SolutionMeta {
                    seed,
                    iterations: cfg.iterations,
                };
                if let Err(e) = fs::write(&path, write_solution(inst, &res.best, &meta)) {
                    row.error = Some(format!("{}: {e}", path.display()));
                }
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct SeriesPoint<'a> {
    size: usize,
    sync: usize,
    class: &'a str,
    series: &'a str,
    value: f64,
}

impl BenchReport {
    /// Writes report.json, classes.csv, details.csv and series.csv into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), BenchError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let json = serde_json::to_string_pretty(self)?;
        let path = dir.join("report.json");
        fs::write(&path, json).map_err(io_err(&path))?;
        write_csv(&dir.join("classes.csv"), &self.classes)?;
        write_csv(&dir.join("details.csv"), &self.details)?;
        let mut series = Vec::new();
        for c in &self.classes {
            let mut push = |name, value| {
                series.push(SeriesPoint {
                    size: c.size,
                    sync: c.sync,
                    class: &c.class,
                    series: name,
                    value,
                })
            };
            push("initial", c.initial);
            push("final", c.final_cost);
            if let Some(r) = c.reference {
                push("reference", r);
            }
        }
        write_csv(&dir.join("series.csv"), &series)
    }
}

pub fn read_details(path: &Path) -> Result<Vec<DetailRow>, BenchError> {
    let mut rdr = csv::Reader::from_path(path)?;
    Ok(rdr.deserialize().collect::<Result<Vec<DetailRow>, _>>()?)
}
