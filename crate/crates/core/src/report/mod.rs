//! Experiment configuration, command execution, verdict reports and plot
//! tables behind the `spectralstrip` binary.
//!
//! A run produces a [`Report`] (`schema_version` 1) with the echoed inputs,
//! named verdicts, command-specific results and an `all_pass` flag. Reports
//! carry no timestamps, so identical configurations give identical bytes.

pub mod cli;
mod config;
mod run;

pub use config::{
    parse_diagonal, parse_grid, parse_list, parse_random, parse_well, Command, ExperimentConfig, GridSpec, Metric, PlotKind,
    PotentialSpec, Profile,
};
pub use run::{emit_plot_data, run, write_outputs, Report, RunResult, SweepPoint, Verdict, SCHEMA_VERSION, THREADS_ENV};
