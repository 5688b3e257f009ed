//! Benchmark suites: a TOML list of graph families, sizes, seeds and
//! algorithms, run in order and written as one CSV row per run.
//!
//! ```toml
//! [config.fast]
//! const_sample = 0.5
//!
//! [[runs]]
//! kind = "regular"
//! sizes = [1024, 4096]
//! param = "sqrt"
//! seeds = [0, 1, 2]
//! algos = ["msqrtn", "fast"]
//! ```
//!
//! The graph of a run is generated with the run's seed.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::generate::{GraphKind, GraphSpec, Param};
use crate::harness::run::{run, Algo, RunConfig, RunMetrics};

pub const CSV_HEADER: [&str; 13] = [
    "kind",
    "param",
    "n",
    "m",
    "delta",
    "algo",
    "seed",
    "recolor_cost",
    "wall_time_s",
    "colors_used",
    "safety_cap_aborts",
    "uncolored",
    "verified",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Suite {
    pub config: RunConfig,
    pub runs: Vec<SuiteEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub kind: GraphKind,
    pub sizes: Vec<usize>,
    pub param: Param,
    pub seeds: Vec<u64>,
    pub algos: Vec<Algo>,
}

impl Suite {
    pub fn from_toml(text: &str) -> Result<Suite> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad suite: {e}")))
    }

    pub fn load(path: &Path) -> Result<Suite> {
        Suite::from_toml(&std::fs::read_to_string(path)?)
    }
}

/// Runs the suite, streaming rows to `out`, and returns every run's metrics.
pub fn bench_to_writer<W: Write>(suite: &Suite, out: W) -> Result<Vec<RunMetrics>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    let mut all = Vec::new();
    for entry in &suite.runs {
        for &n in &entry.sizes {
            let spec = GraphSpec {
                kind: entry.kind,
                n,
                param: entry.param,
            };
            for &seed in &entry.seeds {
                let g = spec.generate(seed)?;
                for &algo in &entry.algos {
                    let (_, metrics) = run(algo, &g, &suite.config, seed)?;
                    w.write_record([
                        entry.kind.to_string(),
                        entry.param.to_string(),
                        metrics.n.to_string(),
                        metrics.m.to_string(),
                        metrics.delta.to_string(),
                        algo.to_string(),
                        seed.to_string(),
                        metrics.recolor_cost.to_string(),
                        format!("{:.6}", metrics.wall_time_s),
                        metrics.colors_used.to_string(),
                        metrics.safety_cap_aborts.to_string(),
                        metrics.uncolored.to_string(),
                        metrics.verified.to_string(),
                    ])
                    .map_err(csv_err)?;
                    w.flush()?;
                    all.push(metrics);
                }
            }
        }
    }
    w.flush()?;
    Ok(all)
}

pub fn bench(suite: &Suite, out: &Path) -> Result<Vec<RunMetrics>> {
    bench_to_writer(suite, File::create(out)?)
}
