//! Graph generation, algorithm dispatch, verification and benchmarks.

pub mod bench;
pub mod generate;
mod run;

pub use bench::{bench, bench_to_writer, Suite, SuiteEntry, CSV_HEADER};
pub use generate::{generate, GraphKind, GraphSpec, Param};
pub use run::{run, verify, Algo, RunConfig, RunMetrics};
