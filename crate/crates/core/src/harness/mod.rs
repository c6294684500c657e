//! Reproducible experiment runs with CSV and JSON output.

mod report;
mod run;
mod spec;

pub use report::{emit, Check, Environment, Row, RunReport, CSV_HEADER};
pub use run::{alternating, predicted_limit, run, tolerance};
pub use spec::{
    parse_alpha, parse_ffun, parse_prime_list, CheckpointPolicy, ExperimentId, ExperimentSpec, Format,
    DEFAULT_THREADS_ENV, MAX_N,
};
