use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{diagonal_well, io, random_potential, square_well, Grid, MatrixPotential, RandomPotentialSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Spectrum,
    Shoot,
    Transform,
    Strip,
    Verify,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Shoot => "shoot",
            Command::Transform => "transform",
            Command::Strip => "strip",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
        }
    }
}

/// Grid presets: `fast` is `[-12, 12]` at `h = 4e-3`, `fine` is `[-15, 15]`
/// at `h = 5e-4`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    #[default]
    Fast,
    Fine,
}

impl Profile {
    pub fn grid(self) -> Grid {
        match self {
            Profile::Fast => Grid::uniform(-12.0, 12.0, 6001),
            Profile::Fine => Grid::uniform(-15.0, 15.0, 60001),
        }
        .expect("preset grids are valid")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `Σλ^{3/2} / ((3/16)∫Tr V²)`.
    #[default]
    #[value(name = "lt_ratio", alias = "lt-ratio")]
    LtRatio,
    /// `Σλ^{3/2} - (3/16)∫Tr V²`.
    Deficit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    Spectrum,
    Braid,
    Sweep,
    Trace,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::Spectrum => "spectrum",
            PlotKind::Braid => "braid",
            PlotKind::Sweep => "sweep",
            PlotKind::Trace => "trace",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Well { depth: f64, a: f64, dim: usize },
    Diagonal { depths: Vec<f64>, a: f64 },
    Random(RandomPotentialSpec),
    File { path: PathBuf },
}

impl PotentialSpec {
    /// Build the potential; files carry their own grid.
    pub fn build(&self, grid: &Grid) -> Result<MatrixPotential> {
        match self {
            PotentialSpec::Well { depth, a, dim } => square_well(*depth, *a, *dim, grid),
            PotentialSpec::Diagonal { depths, a } => diagonal_well(depths, *a, grid),
            PotentialSpec::Random(spec) => random_potential(spec, grid),
            PotentialSpec::File { path } => io::load_potential(path),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            PotentialSpec::Well { dim, .. } => Some(*dim),
            PotentialSpec::Diagonal { depths, .. } => Some(depths.len()),
            PotentialSpec::Random(spec) => Some(spec.dim),
            PotentialSpec::File { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

/// Everything a run needs. Serializes to the `--config` file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub profile: Profile,
    #[serde(default)]
    pub cluster_tol: Option<f64>,
    #[serde(default)]
    pub degeneracy_tol: Option<f64>,
    #[serde(default)]
    pub cutoff_threshold: Option<f64>,
    #[serde(default)]
    pub max_steps: Option<usize>,
    /// Sweep axis for well potentials.
    #[serde(default)]
    pub depths: Vec<f64>,
    /// Sweep axis for random potentials.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub metric: Metric,
    /// Plot tables to emit; empty selects the command's default.
    #[serde(default)]
    pub plots: Vec<PlotKind>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

impl ExperimentConfig {
    pub fn new(command: Command, potential: PotentialSpec) -> Self {
        ExperimentConfig {
            command,
            potential: Some(potential),
            grid: None,
            profile: Profile::Fast,
            cluster_tol: None,
            degeneracy_tol: None,
            cutoff_threshold: None,
            max_steps: None,
            depths: Vec::new(),
            seeds: Vec::new(),
            metric: Metric::LtRatio,
            plots: Vec::new(),
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| usage(format!("bad config file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is plain data")
    }

    pub fn grid(&self) -> Result<Grid> {
        match self.grid {
            Some(g) => Grid::uniform(g.x_min, g.x_max, g.n_points).map_err(|e| usage(e.to_string())),
            None => Ok(self.profile.grid()),
        }
    }

    pub fn potential(&self) -> Result<&PotentialSpec> {
        self.potential.as_ref().ok_or_else(|| usage("no potential given (use --well, --random, --diagonal or --potential)"))
    }

    /// Reject inconsistent or non-positive settings before any work is done.
    pub fn validate(&self) -> Result<()> {
        let spec = self.potential()?;
        for (name, v) in [
            ("cluster-tol", self.cluster_tol),
            ("deg-tol", self.degeneracy_tol),
            ("cutoff", self.cutoff_threshold),
        ] {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(usage(format!("--{name} must be positive, got {v}")));
                }
            }
        }
        if self.max_steps == Some(0) {
            return Err(usage("--max-steps must be at least 1"));
        }
        if matches!(spec, PotentialSpec::File { .. }) && self.grid.is_some() {
            return Err(usage("--grid cannot be combined with --potential (the file carries its grid)"));
        }
        self.grid()?;
        match self.command {
            Command::Sweep => match spec {
                PotentialSpec::Well { .. } if self.depths.is_empty() => Err(usage("sweep over wells needs --depths")),
                PotentialSpec::Random(_) if self.seeds.is_empty() => Err(usage("sweep over random potentials needs --seeds")),
                PotentialSpec::Well { .. } | PotentialSpec::Random(_) => {
                    if self.depths.iter().any(|d| !(*d > 0.0)) {
                        return Err(usage("sweep depths must be positive"));
                    }
                    Ok(())
                }
                _ => Err(usage("sweep needs --well (with --depths) or --random (with --seeds)")),
            },
            _ if !self.depths.is_empty() || !self.seeds.is_empty() => {
                Err(usage("--depths and --seeds only apply to sweep"))
            }
            _ => Ok(()),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim().parse().map_err(|_| usage(format!("{key}: cannot parse '{v}' as a number")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim().parse().map_err(|_| usage(format!("{key}: cannot parse '{v}' as a count")))
}

/// Split `"k1=v1 k2=v2"` (space or comma separated) or a positional list.
fn fields<'a>(text: &'a str, names: &[&'a str]) -> Result<Vec<(&'a str, &'a str)>> {
    if text.contains('=') {
        text.split(|c: char| c.is_whitespace() || c == ',' || c == ';')
            .filter(|t| !t.is_empty())
            .map(|t| {
                let (k, v) = t.split_once('=').ok_or_else(|| usage(format!("expected key=value, got '{t}'")))?;
                if !names.contains(&k) {
                    return Err(usage(format!("unknown key '{k}', expected one of {names:?}")));
                }
                Ok((k, v))
            })
            .collect()
    } else {
        let parts: Vec<&str> = text.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
        if parts.len() > names.len() {
            return Err(usage(format!("expected at most {} values ({names:?}), got '{text}'", names.len())));
        }
        Ok(names.iter().copied().zip(parts).collect())
    }
}

/// `"x_min,x_max,n"`.
pub fn parse_grid(text: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(usage(format!("--grid expects x_min,x_max,n, got '{text}'")));
    }
    Ok(GridSpec {
        x_min: parse_f64("x_min", parts[0])?,
        x_max: parse_f64("x_max", parts[1])?,
        n_points: parse_usize("n", parts[2])?,
    })
}

/// `"depth,a,dim"` or `"depth=1 a=1 dim=1"`; missing keys default to 1.
pub fn parse_well(text: &str) -> Result<PotentialSpec> {
    let (mut depth, mut a, mut dim) = (1.0, 1.0, 1);
    for (k, v) in fields(text, &["depth", "a", "dim"])? {
        match k {
            "depth" => depth = parse_f64(k, v)?,
            "a" => a = parse_f64(k, v)?,
            _ => dim = parse_usize(k, v)?,
        }
    }
    Ok(PotentialSpec::Well { depth, a, dim })
}

/// `"seed,dim,a,strength"` or key=value; `dim`, `a`, `strength` default to 1.
pub fn parse_random(text: &str) -> Result<PotentialSpec> {
    let mut spec = RandomPotentialSpec::new(0, 1, 1.0, 1.0);
    let mut seen_seed = false;
    for (k, v) in fields(text, &["seed", "dim", "a", "strength"])? {
        match k {
            "seed" => {
                spec.seed = v.trim().parse().map_err(|_| usage(format!("seed: cannot parse '{v}'")))?;
                seen_seed = true;
            }
            "dim" => spec.dim = parse_usize(k, v)?,
            "a" => spec.a = parse_f64(k, v)?,
            _ => spec.strength = parse_f64(k, v)?,
        }
    }
    if !seen_seed {
        return Err(usage("--random needs a seed"));
    }
    Ok(PotentialSpec::Random(spec))
}

/// `"d1:d2:..."` depths with optional `a=..`, e.g. `"depths=1:0.5 a=1"`, or
/// the positional form `"1:0.5"` with `a = 1`.
pub fn parse_diagonal(text: &str) -> Result<PotentialSpec> {
    let mut depths = Vec::new();
    let mut a = 1.0;
    let list = |v: &str| v.split(':').map(|d| parse_f64("depths", d)).collect::<Result<Vec<f64>>>();
    if text.contains('=') {
        for (k, v) in fields(text, &["depths", "a"])? {
            match k {
                "depths" => depths = list(v)?,
                _ => a = parse_f64(k, v)?,
            }
        }
    } else {
        depths = list(text)?;
    }
    if depths.is_empty() {
        return Err(usage("--diagonal needs at least one depth"));
    }
    Ok(PotentialSpec::Diagonal { depths, a })
}

pub fn parse_list<T: std::str::FromStr>(key: &str, text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| usage(format!("{key}: cannot parse '{t}'"))))
        .collect()
}
