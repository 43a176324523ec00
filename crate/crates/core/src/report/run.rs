use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{Command, ExperimentConfig, Metric, PlotKind, PotentialSpec};
use crate::darboux::{
    darboux_transform, factorization_residual, find_ground_state, smooth_trial_vectors, trace_identity_residual, GroundState,
    ShootOptions,
};
use crate::error::{Error, Result};
use crate::lattice::{Grid, MatrixPotential};
use crate::spectral::{lt_moment, negative_spectrum, potential_moment, Spectrum, SpectrumOptions};
use crate::stripping::{
    half_moment_verdict, strip_all, theorem1_verdict, HalfMomentVerdict, StripOptions, StrippingTrace, Theorem1Verdict,
};
use crate::table::{fmt_f64, Table};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "SPECTRALSTRIP_THREADS";

/// One named pass/fail check with the number it was decided on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Verdict {
    /// Passes when `value ≤ threshold`.
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Verdict { name: name.into(), pass: value <= threshold, value, threshold }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    /// Depth or seed.
    pub parameter: f64,
    pub value: f64,
    pub count: usize,
    pub theorem1_pass: bool,
}

/// Typed outcome of a command, kept for plot emission.
#[derive(Clone, Debug)]
pub enum RunResult {
    Spectrum(Spectrum),
    Shoot(Box<GroundState>),
    Transform { ground: Box<GroundState>, before: Spectrum, after: Spectrum },
    Strip(Box<StrippingTrace>),
    Verify { spectrum: Spectrum, theorem1: Theorem1Verdict, half: HalfMomentVerdict },
    Sweep { axis: &'static str, metric: Metric, points: Vec<SweepPoint> },
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Command,
    pub inputs: ExperimentConfig,
    pub verdicts: Vec<Verdict>,
    pub results: Value,
    pub all_pass: bool,
    pub error: Option<String>,
    #[serde(skip)]
    pub result: Option<RunResult>,
    #[serde(skip)]
    pub plots: Vec<Table>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is plain data");
        s.push('\n');
        s
    }

    /// One `PASS`/`FAIL` line per verdict.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            out.push_str(&format!(
                "{} {}: value {:e}, threshold {:e}\n",
                if v.pass { "PASS" } else { "FAIL" },
                v.name,
                v.value,
                v.threshold
            ));
        }
        if let Some(e) = &self.error {
            out.push_str(&format!("ERROR {e}\n"));
        }
        out
    }
}

/// Columns per kind (first line of every file is `# spectralstrip <kind> v1`):
///
/// * `spectrum`: `index, lambda, multiplet, marginal`, one row per eigenvalue
/// * `braid`: `x, f` (scalar) or `x, f1, .., fN`, eigenvalues of `F(x)` per node
/// * `sweep`: `depth|seed, lt_ratio|deficit, count, theorem1_pass`
/// * `trace`: one row per stripping step, see [`StrippingTrace::table`]
pub fn emit_plot_data(result: &RunResult, kind: PlotKind) -> Result<Table> {
    match (kind, result) {
        (PlotKind::Spectrum, RunResult::Spectrum(s))
        | (PlotKind::Spectrum, RunResult::Verify { spectrum: s, .. })
        | (PlotKind::Spectrum, RunResult::Transform { after: s, .. }) => Ok(s.table()),
        (PlotKind::Braid, RunResult::Shoot(g)) | (PlotKind::Braid, RunResult::Transform { ground: g, .. }) => {
            Ok(g.riccati().braid_table())
        }
        (PlotKind::Trace, RunResult::Strip(t)) => Ok(t.table()),
        (PlotKind::Sweep, RunResult::Sweep { axis, metric, points }) => {
            let metric_name = match metric {
                Metric::LtRatio => "lt_ratio",
                Metric::Deficit => "deficit",
            };
            let mut t = Table::new("sweep", &[axis, metric_name, "count", "theorem1_pass"]);
            for p in points {
                t.push(vec![fmt_f64(p.parameter), fmt_f64(p.value), p.count.to_string(), p.theorem1_pass.to_string()]);
            }
            Ok(t)
        }
        _ => Err(Error::Usage(format!("no {} data for this command", kind.name()))),
    }
}

fn default_plots(command: Command) -> &'static [PlotKind] {
    match command {
        Command::Spectrum | Command::Verify => &[PlotKind::Spectrum],
        Command::Shoot => &[PlotKind::Braid],
        Command::Transform => &[PlotKind::Spectrum, PlotKind::Braid],
        Command::Strip => &[PlotKind::Trace],
        Command::Sweep => &[PlotKind::Sweep],
    }
}

/// Write `report.json` and one `<kind>.csv` per plot table into `dir`.
pub fn write_outputs(report: &Report, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), report.to_json())?;
    for t in &report.plots {
        fs::write(dir.join(format!("{}.csv", t.kind())), t.to_csv()?)?;
    }
    Ok(())
}

fn spectrum_opts(c: &ExperimentConfig) -> SpectrumOptions {
    SpectrumOptions { cluster_tol: c.cluster_tol }
}

fn shoot_opts(c: &ExperimentConfig) -> ShootOptions {
    ShootOptions { degeneracy_tol: c.degeneracy_tol }
}

fn strip_opts(c: &ExperimentConfig) -> StripOptions {
    let mut o = StripOptions { max_steps: c.max_steps, shoot: shoot_opts(c), spectrum: spectrum_opts(c), ..Default::default() };
    if let Some(t) = c.cutoff_threshold {
        o.cutoff_threshold = t;
    }
    o
}

fn build_potential(spec: &PotentialSpec, grid: &Grid) -> Result<MatrixPotential> {
    spec.build(grid).map_err(|e| match e {
        Error::Parameter(m) => Error::Usage(m),
        Error::Io(e) => Error::Usage(format!("cannot read potential file: {e}")),
        Error::Json(e) => Error::Usage(format!("malformed potential file: {e}")),
        other => other,
    })
}

fn ground(v: &MatrixPotential, c: &ExperimentConfig) -> Result<GroundState> {
    find_ground_state(v, &shoot_opts(c))?.ok_or_else(|| Error::Bracket("the potential has no negative eigenvalue".into()))
}

fn moments_json(s: &Spectrum) -> Value {
    json!({"half": lt_moment(s, 0.5), "one": lt_moment(s, 1.0), "three_halves": lt_moment(s, 1.5)})
}

type Outcome = (Vec<Verdict>, Value, RunResult);

fn cmd_spectrum(v: &MatrixPotential, c: &ExperimentConfig) -> Result<Outcome> {
    let s = negative_spectrum(v, &spectrum_opts(c))?;
    let k = s.ground().map_or(0, |m| m.multiplicity);
    let verdicts = vec![Verdict::at_most("ground_multiplicity_bound", k as f64, v.dim() as f64)];
    let results = json!({
        "spectrum": s,
        "lt_moments": moments_json(&s),
        "potential_moments": {"trace": potential_moment(v, 1)?, "trace_square": potential_moment(v, 2)?},
    });
    Ok((verdicts, results, RunResult::Spectrum(s)))
}

fn ground_verdicts(v: &MatrixPotential, gs: &GroundState) -> Result<Vec<Verdict>> {
    let lam = gs.lambda();
    let k = gs.multiplicity();
    let grid = v.grid();
    let half = 0.5 * (-grid.x_min()).min(grid.x_max());
    let trials = smooth_trial_vectors(0, 10, grid, v.dim(), half)?;
    let fact = factorization_residual(v, gs, &trials)?;
    Ok(vec![
        Verdict::at_most("hermiticity", gs.riccati().max_hermiticity_defect(), 1e-8 * lam.sqrt()),
        Verdict { name: "multiplicity_range".into(), pass: (1..=v.dim()).contains(&k), value: k as f64, threshold: v.dim() as f64 },
        Verdict::at_most("factorization", fact, 1e-4 * v.field().max_norm2().max(1.0)),
    ])
}

fn cmd_shoot(v: &MatrixPotential, c: &ExperimentConfig) -> Result<Outcome> {
    let gs = ground(v, c)?;
    let fd = negative_spectrum(v, &spectrum_opts(c))?;
    let fd_ground = fd.ground().map_or(0.0, |m| m.lambda);
    let mut verdicts = ground_verdicts(v, &gs)?;
    let diff = (gs.lambda() - fd_ground).abs();
    verdicts.push(Verdict::at_most("shoot_vs_spectrum", diff, 1e-4 * gs.lambda().max(1.0)));
    let results = json!({"ground_state": gs.summary_json(), "spectrum_ground": fd_ground});
    Ok((verdicts, results, RunResult::Shoot(Box::new(gs))))
}

/// Resolved eigenvalues of `after` against `before` minus its ground
/// multiplet: (count mismatch, largest shift).
fn removal_mismatch(before: &Spectrum, after: &Spectrum, k: usize) -> (usize, f64) {
    let floor = before.marginal_floor();
    let rest: Vec<f64> = before.raw_eigenvalues().iter().skip(k).copied().filter(|l| *l >= floor).collect();
    let new: Vec<f64> = after.raw_eigenvalues().iter().copied().filter(|l| *l >= floor).collect();
    let shift = rest.iter().zip(&new).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    (rest.len().abs_diff(new.len()), shift)
}

fn cmd_transform(v: &MatrixPotential, c: &ExperimentConfig) -> Result<Outcome> {
    let gs = ground(v, c)?;
    let w = darboux_transform(v, &gs)?;
    let resid = trace_identity_residual(v, &w, &gs)?;
    let moment = potential_moment(v, 2)?;
    let before = negative_spectrum(v, &spectrum_opts(c))?;
    let after = negative_spectrum(&w, &spectrum_opts(c))?;
    let (count_diff, shift) = removal_mismatch(&before, &after, gs.multiplicity());
    let mut verdicts = ground_verdicts(v, &gs)?;
    verdicts.push(Verdict::at_most("trace_identity", resid.abs(), 1e-4 * moment));
    verdicts.push(Verdict::at_most("removal_count", count_diff as f64, 0.0));
    verdicts.push(Verdict::at_most("removal_shift", shift, 1e-4 * gs.lambda().max(1.0)));
    let results = json!({
        "ground_state": gs.summary_json(),
        "trace_identity_residual": resid,
        "moment_before": moment,
        "moment_after": potential_moment(&w, 2)?,
        "spectrum_before": before,
        "spectrum_after": after,
    });
    Ok((verdicts, results, RunResult::Transform { ground: Box::new(gs), before, after }))
}

fn cmd_strip(v: &MatrixPotential, c: &ExperimentConfig) -> Result<Outcome> {
    let trace = strip_all(v, &strip_opts(c))?;
    let tele = trace
        .steps
        .iter()
        .map(|s| s.identity_residual.abs() / s.moment_before.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let verdicts = vec![
        Verdict::at_most("ledger", trace.deficit - trace.total_error, 1e-6),
        Verdict::at_most("telescoping", tele, 1e-3),
    ];
    // Early termination is reported, not failed: the unremoved eigenvalues
    // already enter the deficit through the remaining spectrum.
    let results = json!({
        "complete": trace.is_complete(),
        "trace": trace,
        "cutoff_error_note": "e_i = tail_mass + N * cutoff_threshold * domain_width is a conservative surrogate, not a proven bound",
    });
    Ok((verdicts, results, RunResult::Strip(Box::new(trace))))
}

fn cmd_verify(v: &MatrixPotential, c: &ExperimentConfig) -> Result<Outcome> {
    let spectrum = negative_spectrum(v, &spectrum_opts(c))?;
    let theorem1 = theorem1_verdict(&spectrum, potential_moment(v, 2)?);
    let half = half_moment_verdict(&spectrum, potential_moment(v, 1)?);
    let verdicts = vec![
        Verdict { name: "theorem1".into(), pass: theorem1.pass, value: theorem1.deficit, threshold: theorem1.tolerance },
        Verdict::at_most("half_moment_lower", half.lower - half.moment, half.tolerance),
        Verdict::at_most("half_moment_upper", half.moment - half.upper, half.tolerance),
    ];
    let results = json!({"theorem1": theorem1, "half_moment": half, "spectrum": spectrum});
    Ok((verdicts, results, RunResult::Verify { spectrum, theorem1, half }))
}

fn sweep_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.parse().map_err(|_| Error::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(Error::Usage(format!("{THREADS_ENV} must be positive")));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::numerical(format!("cannot start worker pool: {e}")))
}

fn cmd_sweep(grid: &Grid, c: &ExperimentConfig) -> Result<Outcome> {
    let spec = c.potential()?;
    let (axis, cases): (&'static str, Vec<(f64, PotentialSpec)>) = match spec {
        PotentialSpec::Well { a, dim, .. } => {
            ("depth", c.depths.iter().map(|&d| (d, PotentialSpec::Well { depth: d, a: *a, dim: *dim })).collect())
        }
        PotentialSpec::Random(r) => (
            "seed",
            c.seeds.iter().map(|&s| (s as f64, PotentialSpec::Random(crate::lattice::RandomPotentialSpec { seed: s, ..*r }))).collect(),
        ),
        _ => return Err(Error::Usage("sweep needs --well or --random".into())),
    };
    let opts = spectrum_opts(c);
    let points: Vec<SweepPoint> = sweep_pool()?.install(|| {
        cases
            .par_iter()
            .map(|(param, spec)| {
                let v = build_potential(spec, grid)?;
                let s = negative_spectrum(&v, &opts)?;
                let t = theorem1_verdict(&s, potential_moment(&v, 2)?);
                let value = match c.metric {
                    Metric::LtRatio if t.rhs > 0.0 => t.lhs / t.rhs,
                    Metric::LtRatio => 0.0,
                    Metric::Deficit => t.deficit,
                };
                Ok(SweepPoint { parameter: *param, value, count: s.count(), theorem1_pass: t.pass })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let failing = points.iter().filter(|p| !p.theorem1_pass).count();
    let mut verdicts = vec![Verdict::at_most("theorem1_all", failing as f64, 0.0)];
    if axis == "depth" && c.metric == Metric::LtRatio {
        let mut order: Vec<&SweepPoint> = points.iter().collect();
        order.sort_by(|a, b| a.parameter.total_cmp(&b.parameter));
        let drops = order.windows(2).filter(|w| w[1].value <= w[0].value).count();
        verdicts.push(Verdict::at_most("monotone_increasing", drops as f64, 0.0));
    }
    let results = json!({"axis": axis, "metric": c.metric, "points": points});
    Ok((verdicts, results, RunResult::Sweep { axis, metric: c.metric, points }))
}

/// Execute a configured command.
///
/// Usage problems (bad settings, unreadable inputs, mismatched plot kinds)
/// are returned as `Err(Error::Usage)`. Numerical failures are captured in
/// the report's `error` field with `all_pass = false`.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let grid = config.grid()?;
    let plots = if config.plots.is_empty() { default_plots(config.command).to_vec() } else { config.plots.clone() };
    for &kind in &plots {
        if !default_plots(config.command).contains(&kind) {
            return Err(Error::Usage(format!("{} cannot emit {} data", config.command.name(), kind.name())));
        }
    }

    let outcome = if config.command == Command::Sweep {
        cmd_sweep(&grid, config)
    } else {
        let v = build_potential(config.potential()?, &grid)?;
        match config.command {
            Command::Spectrum => cmd_spectrum(&v, config),
            Command::Shoot => cmd_shoot(&v, config),
            Command::Transform => cmd_transform(&v, config),
            Command::Strip => cmd_strip(&v, config),
            Command::Verify => cmd_verify(&v, config),
            Command::Sweep => unreachable!(),
        }
    };

    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        command: config.command,
        inputs: config.clone(),
        verdicts: Vec::new(),
        results: Value::Null,
        all_pass: false,
        error: None,
        result: None,
        plots: Vec::new(),
    };
    match outcome {
        Ok((verdicts, results, result)) => {
            report.all_pass = verdicts.iter().all(|v| v.pass);
            report.plots = plots.iter().map(|&k| emit_plot_data(&result, k)).collect::<Result<_>>()?;
            report.verdicts = verdicts;
            report.results = results;
            report.result = Some(result);
        }
        Err(e @ Error::Usage(_)) => return Err(e),
        Err(e) => report.error = Some(e.to_string()),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::config::parse_well;

    #[test]
    fn mismatched_plot_kind_is_usage_error() {
        let s = Spectrum::from_multiplets(&[]);
        assert!(matches!(emit_plot_data(&RunResult::Spectrum(s.clone()), PlotKind::Braid), Err(Error::Usage(_))));
        let t = emit_plot_data(&RunResult::Spectrum(s), PlotKind::Spectrum).unwrap();
        assert!(t.rows().is_empty());
        let mut c = ExperimentConfig::new(Command::Verify, parse_well("1,1,1").unwrap());
        c.plots = vec![PlotKind::Trace];
        assert!(matches!(run(&c), Err(Error::Usage(_))));
    }

    #[test]
    fn verify_well_report() {
        let c = ExperimentConfig::new(Command::Verify, parse_well("depth=1 a=1 dim=1").unwrap());
        let r = run(&c).unwrap();
        assert!(r.all_pass, "{}", r.summary());
        let t1 = &r.results["theorem1"];
        assert!((t1["lhs"].as_f64().unwrap() - 0.4537531658603282f64.powf(1.5)).abs() < 1e-4);
        assert_eq!(r.to_json(), run(&c).unwrap().to_json());
    }

    #[test]
    fn shoot_random_report_passes() {
        let mut c = ExperimentConfig::new(Command::Shoot, parse_well("1,1,1").unwrap());
        c.potential = Some(PotentialSpec::Random(crate::lattice::RandomPotentialSpec::new(1, 1, 1.0, 1.0)));
        let r = run(&c).unwrap();
        assert!(r.error.is_none() && r.all_pass, "{}", r.summary());
    }
}
