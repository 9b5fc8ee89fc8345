//! Experiment harness: data sources, configuration, trial execution and
//! CSV output.

mod config;
mod data;
mod run;

pub use config::{DatasetKind, ExperimentConfig, DEFAULT_TRIALS, FIGURE_TRIALS};
pub use data::{evenly_spaced_quantiles, gen_gaussian, gen_uniform, ingest_csv, subsample, Ingested};
pub use run::{
    format_sig, records_to_csv, run_experiment, summarize, write_records_csv, ExperimentRecord, Summary, CSV_HEADER,
};
