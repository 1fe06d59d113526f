//! Experiment harness around the `ips2` library: dataset generation,
//! repeated benchmark runs with aggregated metrics, parameter sweeps and
//! similarity dumps.
//!
//! Reports are pure functions of their [`ExperimentSpec`]; wall-clock
//! timings go to a separate sidecar so a report regenerated from its
//! recorded spec is byte-identical.

pub mod bench;
pub mod dump;
pub mod error;
pub mod gen;
pub mod report;
pub mod spec;
pub mod sweep;

pub use bench::{run_bench, write_bench, BenchOutcome};
pub use error::{HarnessError, Result};
pub use report::{MetricsReport, SCHEMA_VERSION};
pub use spec::{DataSource, ExperimentSpec, GeneratorSpec};
pub use sweep::{run_sweep, SweepParam, SweepRow};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "IPS2_OUT_DIR";

/// Used when neither a flag nor [`OUT_DIR_ENV`] names an output directory.
pub const DEFAULT_OUT_DIR: &str = "ips2-out";
