//! Argument parsing and exit-code policy for the `spectralstrip` binary.
//!
//! Exit codes: 0 when every verdict passes, 1 on a failed verdict or a
//! numerical failure, 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::Parser;

use super::config::{
    parse_diagonal, parse_grid, parse_list, parse_random, parse_well, Command, ExperimentConfig, Metric, PlotKind,
    PotentialSpec, Profile,
};
use super::run::{run, write_outputs};
use crate::error::{Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "spectralstrip", version, about = "Negative spectra, ground-state stripping and Lieb-Thirring checks for 1D matrix potentials")]
pub struct Cli {
    /// Command to run.
    #[arg(value_enum)]
    pub command: Command,
    /// JSON experiment config; other flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Explicit grid `x_min,x_max,n_points`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    // Source specs accept either one token (`1,1,1`) or several
    // `key=value` tokens (`depth=1 a=1 dim=1`), joined with spaces.
    /// Square well `depth,a,dim` or `depth=.. a=.. dim=..`.
    #[arg(long, group = "source", num_args = 1.., value_name = "SPEC")]
    pub well: Option<Vec<String>>,
    /// Random bump potential `seed,dim,a,strength` or key=value form.
    #[arg(long, group = "source", num_args = 1.., value_name = "SPEC")]
    pub random: Option<Vec<String>>,
    /// Diagonal well `depths=d1:d2:.. a=..`.
    #[arg(long, group = "source", num_args = 1.., value_name = "SPEC")]
    pub diagonal: Option<Vec<String>>,
    /// Potential JSON file.
    #[arg(long, group = "source")]
    pub potential: Option<PathBuf>,
    #[arg(long, value_enum, group = "grid_profile")]
    pub profile: Option<Profile>,
    /// Shorthand for `--profile fast`.
    #[arg(long, group = "grid_profile")]
    pub fast: bool,
    /// Shorthand for `--profile fine`.
    #[arg(long, group = "grid_profile")]
    pub fine: bool,
    /// Eigenvalue clustering tolerance.
    #[arg(long)]
    pub cluster_tol: Option<f64>,
    /// Ground-state degeneracy tolerance.
    #[arg(long = "deg-tol")]
    pub deg_tol: Option<f64>,
    /// Support truncation threshold for stripping.
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Comma-separated well depths for `sweep`.
    #[arg(long)]
    pub depths: Option<String>,
    /// Comma-separated seeds for `sweep`.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long, value_enum)]
    pub metric: Option<Metric>,
    /// Plot table to emit; repeatable.
    #[arg(long = "plot", value_enum)]
    pub plots: Vec<PlotKind>,
    /// Output directory for `report.json` and CSV tables.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Cli {
    /// Merge flags over an optional config file.
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let flag_potential = if let Some(s) = &self.well {
            Some(parse_well(&s.join(" "))?)
        } else if let Some(s) = &self.random {
            Some(parse_random(&s.join(" "))?)
        } else if let Some(s) = &self.diagonal {
            Some(parse_diagonal(&s.join(" "))?)
        } else {
            self.potential.as_ref().map(|p| PotentialSpec::File { path: p.clone() })
        };

        let mut c = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
                let mut c = ExperimentConfig::from_json(&text)?;
                c.command = self.command;
                c
            }
            None => {
                let p = flag_potential.clone().ok_or_else(|| {
                    Error::Usage("a potential is required: --well, --random, --diagonal, --potential or --config".into())
                })?;
                ExperimentConfig::new(self.command, p)
            }
        };
        if let Some(p) = flag_potential {
            c.potential = Some(p);
        }
        if let Some(g) = &self.grid {
            c.grid = Some(parse_grid(g)?);
        }
        let profile = match (self.fast, self.fine) {
            (true, _) => Some(Profile::Fast),
            (_, true) => Some(Profile::Fine),
            _ => self.profile,
        };
        if let Some(p) = profile {
            c.profile = p;
        }
        c.cluster_tol = self.cluster_tol.or(c.cluster_tol);
        c.degeneracy_tol = self.deg_tol.or(c.degeneracy_tol);
        c.cutoff_threshold = self.cutoff.or(c.cutoff_threshold);
        c.max_steps = self.max_steps.or(c.max_steps);
        if let Some(d) = &self.depths {
            c.depths = parse_list("depths", d)?;
        }
        if let Some(s) = &self.seeds {
            c.seeds = parse_list("seeds", s)?;
        }
        if let Some(m) = self.metric {
            c.metric = m;
        }
        if !self.plots.is_empty() {
            c.plots = self.plots;
        }
        if self.out.is_some() {
            c.out = self.out;
        }
        c.validate()?;
        Ok(c)
    }
}

fn execute(config: &ExperimentConfig) -> Result<i32> {
    let report = run(config)?;
    match &config.out {
        Some(dir) => {
            write_outputs(&report, dir)?;
            eprint!("{}", report.summary());
        }
        None => print!("{}", report.to_json()),
    }
    Ok(if report.all_pass && report.error.is_none() { EXIT_PASS } else { EXIT_FAIL })
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let outcome = cli.into_config().and_then(|c| execute(&c));
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) | Error::Parameter(_) | Error::Json(_) => EXIT_USAGE,
                Error::Io(_) | Error::Csv(_) => EXIT_USAGE,
                _ => EXIT_FAIL,
            }
        }
    }
}
