//! Strategy-comparison sweeps: every combination of line-search strategy, model preset,
//! dilation angle, mesh size, characteristic displacement and seed is solved once and
//! reported as a CSV row and an iteration-count table.

pub mod error;
pub mod output;
pub mod spec;
pub mod sweep;

pub use error::{BenchError, Result};
pub use output::{csv_string, emit_csv, format_table, read_csv, write_csv, SCHEMA_LINE};
pub use spec::{Criterion, FileConfig, SweepSpec};
pub use sweep::{expand, run_sweep, ResultRow, RunStatus, SweepCell, SweepResult};
