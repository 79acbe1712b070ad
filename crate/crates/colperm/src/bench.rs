//! Grid runs, CSV records and summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use colperm_core::search::{self, Backend, Procedure, SearchResult};
use colperm_core::Instance;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::FileError;
use crate::grid::{GridConfig, InstanceSpec};
use crate::wilcoxon::{self, Alternative, StatsError, WilcoxonReport};

/// One timed search run. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub set: String,
    pub rows: usize,
    pub cols: usize,
    pub density: f64,
    #[serde(with = "by_name")]
    pub procedure: Procedure,
    #[serde(with = "by_name")]
    pub backend: Backend,
    pub seed: u64,
    pub rep: u32,
    pub time_ms: f64,
    pub final_value: u32,
    pub improvements: u64,
    pub full_evals: u64,
    pub set_inits: u64,
    pub adj_swaps: u64,
}

pub const CSV_HEADER: &str = "instance,set,rows,cols,density,procedure,backend,seed,rep,time_ms,\
                              final_value,improvements,full_evals,set_inits,adj_swaps";

mod by_name {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Instance(#[from] FileError),
    #[error("backends disagree on {instance} ({procedure}, seed {seed}): {detail}\n  reproduce: {repro}")]
    Mismatch {
        instance: String,
        procedure: Procedure,
        seed: u64,
        detail: String,
        repro: String,
    },
    #[error("csv {path}: {source}")]
    Csv { path: String, source: csv::Error },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Run grid cells one after another instead of on the rayon pool.
    pub sequential: bool,
}

pub fn timed_run(inst: &Instance, procedure: Procedure, backend: Backend, seed: u64) -> SearchResult {
    let origin = Instant::now();
    search::run(inst, procedure, backend, seed, || origin.elapsed())
}

struct Cell {
    set: usize,
    inst: usize,
    proc_idx: usize,
    backend_idx: usize,
    seed: u64,
    rep: u32,
}

/// Runs every (set, instance, procedure, backend, seed, repetition)
/// combination and checks that all backends agree on the final objective
/// and improvement count.
pub fn run_grid(cfg: &GridConfig, opts: RunOptions) -> Result<Vec<BenchRecord>, BenchError> {
    let mut loaded: Vec<Vec<(InstanceSpec, Instance)>> = Vec::new();
    for set in &cfg.sets {
        let mut v = Vec::new();
        for spec in &set.instances {
            v.push((spec.clone(), spec.load()?));
        }
        loaded.push(v);
    }

    let mut cells = Vec::new();
    for (si, set) in loaded.iter().enumerate() {
        for ii in 0..set.len() {
            for pi in 0..cfg.procedures.len() {
                for &seed in &cfg.seeds {
                    for rep in 1..=cfg.repetitions {
                        for bi in 0..cfg.backends.len() {
                            cells.push(Cell {
                                set: si,
                                inst: ii,
                                proc_idx: pi,
                                backend_idx: bi,
                                seed,
                                rep,
                            });
                        }
                    }
                }
            }
        }
    }

    let run_cell = |c: &Cell| {
        let (spec, inst) = &loaded[c.set][c.inst];
        let procedure = cfg.procedures[c.proc_idx];
        let backend = cfg.backends[c.backend_idx];
        let r = timed_run(inst, procedure, backend, c.seed);
        BenchRecord {
            instance: spec.id(),
            set: cfg.sets[c.set].name.clone(),
            rows: inst.rows(),
            cols: inst.cols(),
            density: inst.density(),
            procedure,
            backend,
            seed: c.seed,
            rep: c.rep,
            time_ms: r.elapsed.as_secs_f64() * 1e3,
            final_value: r.objective,
            improvements: r.improvements,
            full_evals: r.counters.evaluations,
            set_inits: r.counters.set_inits,
            adj_swaps: r.counters.adjacent_swaps,
        }
    };
    let key = |c: &Cell| (c.set, c.inst, c.proc_idx, c.backend_idx, c.seed, c.rep);
    let mut out: Vec<_> = if opts.sequential {
        cells.iter().map(|c| (key(c), run_cell(c))).collect()
    } else {
        cells.par_iter().map(|c| (key(c), run_cell(c))).collect()
    };
    out.sort_by_key(|(k, _)| *k);
    let records: Vec<BenchRecord> = out.into_iter().map(|(_, r)| r).collect();

    check_agreement(&records, |set, instance| {
        loaded[set_index(cfg, set)]
            .iter()
            .find(|(s, _)| s.id() == instance)
            .map(|(s, _)| s.cli_args())
            .unwrap_or_default()
    })?;
    Ok(records)
}

fn set_index(cfg: &GridConfig, name: &str) -> usize {
    cfg.sets.iter().position(|s| s.name == name).unwrap_or(0)
}

/// Fails on the first (instance, procedure, seed, repetition) group whose
/// backends report different objectives or improvement counts.
pub fn check_agreement(
    records: &[BenchRecord],
    instance_args: impl Fn(&str, &str) -> String,
) -> Result<(), BenchError> {
    let mut groups: BTreeMap<(&str, &str, Procedure, u64, u32), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((&r.set, &r.instance, r.procedure, r.seed, r.rep))
            .or_default()
            .push(r);
    }
    for ((set, instance, procedure, seed, _), rs) in groups {
        let first = rs[0];
        if let Some(bad) = rs
            .iter()
            .find(|r| (r.final_value, r.improvements) != (first.final_value, first.improvements))
        {
            return Err(BenchError::Mismatch {
                instance: instance.to_owned(),
                procedure,
                seed,
                detail: format!(
                    "{} gives value {} with {} improvements, {} gives {} with {}",
                    first.backend,
                    first.final_value,
                    first.improvements,
                    bad.backend,
                    bad.final_value,
                    bad.improvements
                ),
                repro: format!(
                    "colperm search {} --ls {procedure} --method {} --seed {seed}",
                    instance_args(set, instance),
                    bad.backend
                ),
            });
        }
    }
    Ok(())
}

pub fn write_csv(records: &[BenchRecord], path: impl AsRef<Path>) -> Result<(), BenchError> {
    let path = path.as_ref();
    let csv_err = |source| BenchError::Csv {
        path: path.display().to_string(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(',')).map_err(csv_err)?;
    }
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| csv_err(e.into()))?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<BenchRecord>, BenchError> {
    let path = path.as_ref();
    let csv_err = |source| BenchError::Csv {
        path: path.display().to_string(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub set: String,
    pub procedure: Procedure,
    pub backend: Backend,
    pub runs: usize,
    pub mean_time_ms: f64,
    pub median_time_ms: f64,
    pub max_time_ms: f64,
    pub mean_evals: f64,
    pub mean_set_inits: f64,
    pub mean_adj_swaps: f64,
    pub mean_final_value: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// One row per (set, procedure, backend), sorted by set name, then
/// procedure and backend order.
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(&str, Procedure, Backend), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((&r.set, r.procedure, r.backend)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((set, procedure, backend), rs)| SummaryRow {
            set: set.to_owned(),
            procedure,
            backend,
            runs: rs.len(),
            mean_time_ms: mean(rs.iter().map(|r| r.time_ms)),
            median_time_ms: median(rs.iter().map(|r| r.time_ms).collect()),
            max_time_ms: rs.iter().map(|r| r.time_ms).fold(0.0, f64::max),
            mean_evals: mean(rs.iter().map(|r| r.full_evals as f64)),
            mean_set_inits: mean(rs.iter().map(|r| r.set_inits as f64)),
            mean_adj_swaps: mean(rs.iter().map(|r| r.adj_swaps as f64)),
            mean_final_value: mean(rs.iter().map(|r| f64::from(r.final_value))),
        })
        .collect()
}

pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<12} {:<10} {:<9} {:>5} {:>12} {:>12} {:>12} {:>14} {:>9} {:>14} {:>9}",
        "set",
        "procedure",
        "backend",
        "runs",
        "mean_ms",
        "median_ms",
        "max_ms",
        "mean_evals",
        "inits",
        "adj_swaps",
        "value"
    )
    .unwrap();
    for r in rows {
        writeln!(
            out,
            "{:<12} {:<10} {:<9} {:>5} {:>12.3} {:>12.3} {:>12.3} {:>14.1} {:>9.1} {:>14.1} {:>9.2}",
            r.set,
            r.procedure,
            r.backend,
            r.runs,
            r.mean_time_ms,
            r.median_time_ms,
            r.max_time_ms,
            r.mean_evals,
            r.mean_set_inits,
            r.mean_adj_swaps,
            r.mean_final_value
        )
        .unwrap();
    }
    out
}

/// Paired run times of two backends for one set and procedure, matched on
/// (instance, seed, repetition).
pub fn paired_times(
    records: &[BenchRecord],
    set: &str,
    procedure: Procedure,
    a: Backend,
    b: Backend,
) -> (Vec<f64>, Vec<f64>) {
    let mut by_key: BTreeMap<(&str, u64, u32), [Option<f64>; 2]> = BTreeMap::new();
    for r in records.iter().filter(|r| r.set == set && r.procedure == procedure) {
        let slot = if r.backend == a {
            0
        } else if r.backend == b {
            1
        } else {
            continue;
        };
        by_key.entry((&r.instance, r.seed, r.rep)).or_default()[slot] = Some(r.time_ms);
    }
    by_key.into_values().filter_map(|[x, y]| Some((x?, y?))).unzip()
}

pub fn compare_times(
    records: &[BenchRecord],
    set: &str,
    procedure: Procedure,
    a: Backend,
    b: Backend,
    alternative: Alternative,
) -> Result<WilcoxonReport, StatsError> {
    let (x, y) = paired_times(records, set, procedure, a, b);
    wilcoxon::wilcoxon_signed_rank(&x, &y, alternative)
}
