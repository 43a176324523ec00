use serde::{Deserialize, Serialize};

use crate::darboux::{darboux_transform, find_ground_state, GroundState, ShootOptions};
use crate::error::{Error, Result};
use crate::lattice::{truncate_support, MatrixField, MatrixPotential};
use crate::spectral::{lt_moment, negative_spectrum, potential_moment, ground_estimate, Spectrum, SpectrumOptions};
use crate::table::{fmt_f64, Table};

/// Relative tolerance of the per-step trace identity.
const TELESCOPING_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripOptions {
    pub cutoff_threshold: f64,
    /// Defaults to `64·N`.
    pub max_steps: Option<usize>,
    pub shoot: ShootOptions,
    pub spectrum: SpectrumOptions,
    /// Keep every intermediate potential in the trace.
    pub keep_intermediate: bool,
}

impl Default for StripOptions {
    fn default() -> Self {
        StripOptions {
            cutoff_threshold: 1e-10,
            max_steps: None,
            shoot: ShootOptions::default(),
            spectrum: SpectrumOptions::default(),
            keep_intermediate: false,
        }
    }
}

/// One removal: shoot, transform, cut off.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripStep {
    pub lambda: f64,
    pub multiplicity: usize,
    /// `∫Tr V²` of the potential entering the step.
    pub moment_before: f64,
    /// `∫Tr V²` of the transformed field before the cutoff.
    pub moment_after: f64,
    /// `moment_after - moment_before + (16/3) K λ^{3/2}`.
    pub identity_residual: f64,
    pub cutoff_radius: f64,
    pub tail_mass: f64,
    /// `N · threshold · domain width`.
    pub shift_bound: f64,
    /// `tail_mass + shift_bound`.
    pub error: f64,
}

impl StripStep {
    pub fn identity_holds(&self) -> bool {
        self.identity_residual.abs() <= TELESCOPING_TOL * self.moment_before.abs()
    }
}

#[derive(Clone, Debug)]
pub enum StripOutcome {
    Removed { step: StripStep, ground: Box<GroundState>, potential: MatrixPotential },
    NoBoundState,
}

/// Strip the ground multiplet of `v` and cut the result back to compact support.
pub fn strip_once(v: &MatrixPotential, opts: &StripOptions) -> Result<StripOutcome> {
    let Some(gs) = find_ground_state(v, &opts.shoot)? else {
        return Ok(StripOutcome::NoBoundState);
    };
    strip_with(v, gs, opts)
}

fn strip_with(v: &MatrixPotential, gs: GroundState, opts: &StripOptions) -> Result<StripOutcome> {
    let transformed = darboux_transform(v, &gs)?;
    let moment_before = potential_moment(v, 2)?;
    let moment_after = potential_moment(&transformed, 2)?;
    let (lambda, k) = (gs.lambda(), gs.multiplicity());
    let identity_residual = moment_after - moment_before + 16.0 / 3.0 * k as f64 * lambda.powf(1.5);
    let cut = truncate_support(&transformed, opts.cutoff_threshold)?;
    let shift_bound = v.dim() as f64 * opts.cutoff_threshold * v.grid().width();
    let step = StripStep {
        lambda,
        multiplicity: k,
        moment_before,
        moment_after,
        identity_residual,
        cutoff_radius: cut.cutoff_radius,
        tail_mass: cut.tail_mass,
        shift_bound,
        error: cut.tail_mass + shift_bound,
    };
    Ok(StripOutcome::Removed { step, ground: Box::new(gs), potential: cut.potential })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// No negative eigenvalue is left.
    Empty,
    /// Only eigenvalues below the box resolution floor are left.
    Marginal,
    /// The step budget ran out with bound states remaining.
    MaxSteps,
    /// A transformed field did not decay inside the grid.
    DomainExhausted,
}

/// Full ledger of [`strip_all`].
#[derive(Clone, Debug, Serialize)]
pub struct StrippingTrace {
    pub steps: Vec<StripStep>,
    pub termination: Termination,
    /// Diagnostic for `DomainExhausted`.
    pub note: Option<String>,
    /// `∫Tr V²` of the input.
    pub initial_moment: f64,
    /// `Σ K λ^{3/2}` over steps.
    pub removed_moment: f64,
    /// Negative spectrum of the final potential.
    pub remaining: Spectrum,
    /// `removed_moment + Σ_remaining λ^{3/2} - (3/16) initial_moment`.
    pub deficit: f64,
    /// `(3/16) ∫Tr W²` of the final potential.
    pub residual_moment: f64,
    /// Number of remaining eigenvalues below the box floor times `floor^{3/2}`.
    pub marginal_bound: f64,
    /// `Σ e_i + marginal_bound`.
    pub total_error: f64,
    /// Every step satisfied the trace identity to relative `1e-3`.
    pub telescoping_ok: bool,
    #[serde(skip)]
    pub final_potential: MatrixPotential,
    #[serde(skip)]
    pub intermediate: Vec<MatrixPotential>,
}

impl StrippingTrace {
    pub fn is_complete(&self) -> bool {
        matches!(self.termination, Termination::Empty | Termination::Marginal)
    }

    /// The ledger inequality `deficit ≤ total_error + 1e-6`.
    pub fn ledger_holds(&self) -> bool {
        self.deficit <= self.total_error + 1e-6
    }

    pub fn removed_count(&self) -> usize {
        self.steps.iter().map(|s| s.multiplicity).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per step.
    pub fn table(&self) -> Table {
        let mut t = Table::new(
            "trace",
            &[
                "step",
                "lambda",
                "multiplicity",
                "moment_before",
                "moment_after",
                "identity_residual",
                "cutoff_radius",
                "tail_mass",
                "shift_bound",
                "error",
            ],
        );
        for (i, s) in self.steps.iter().enumerate() {
            t.push(
                [
                    (i + 1).to_string(),
                    fmt_f64(s.lambda),
                    s.multiplicity.to_string(),
                    fmt_f64(s.moment_before),
                    fmt_f64(s.moment_after),
                    fmt_f64(s.identity_residual),
                    fmt_f64(s.cutoff_radius),
                    fmt_f64(s.tail_mass),
                    fmt_f64(s.shift_bound),
                    fmt_f64(s.error),
                ]
                .into(),
            );
        }
        t
    }
}

/// Strip multiplets until the spectrum is empty or only marginal eigenvalues
/// remain.
///
/// The loop stops early (flagged, not an error) when the step budget runs
/// out or a transformed field fails to decay inside the grid. Eigenvalues
/// still present at the end enter the deficit with their finite-difference
/// values.
pub fn strip_all(v: &MatrixPotential, opts: &StripOptions) -> Result<StrippingTrace> {
    let max_steps = opts.max_steps.unwrap_or(64 * v.dim());
    let floor = v.grid().marginal_floor();
    let initial_moment = potential_moment(v, 2)?;
    let mut current = v.clone();
    let mut steps = Vec::new();
    let mut intermediate = Vec::new();
    let mut note = None;

    let termination = loop {
        let Some(est) = ground_estimate(&current)? else {
            break Termination::Empty;
        };
        if est < floor {
            break Termination::Marginal;
        }
        if steps.len() == max_steps {
            break Termination::MaxSteps;
        }
        let gs = match find_ground_state(&current, &opts.shoot)? {
            Some(gs) => gs,
            None => break Termination::Empty,
        };
        match strip_with(&current, gs, opts) {
            Ok(StripOutcome::Removed { step, potential, .. }) => {
                steps.push(step);
                if opts.keep_intermediate {
                    intermediate.push(std::mem::replace(&mut current, potential));
                } else {
                    current = potential;
                }
            }
            Ok(StripOutcome::NoBoundState) => break Termination::Empty,
            Err(Error::Decay(msg)) => {
                note = Some(msg);
                break Termination::DomainExhausted;
            }
            Err(e) => return Err(e),
        }
    };

    let remaining = negative_spectrum(&current, &opts.spectrum)?;
    let removed_moment: f64 = steps.iter().map(|s| s.multiplicity as f64 * s.lambda.powf(1.5)).sum();
    let deficit = removed_moment + lt_moment(&remaining, 1.5) - 3.0 / 16.0 * initial_moment;
    let residual_moment = 3.0 / 16.0 * potential_moment(&current, 2)?;
    let marginal_count: usize = remaining.multiplets().iter().filter(|m| m.lambda < floor).map(|m| m.multiplicity).sum();
    let marginal_bound = marginal_count as f64 * floor.powf(1.5);
    let total_error = steps.iter().map(|s| s.error).sum::<f64>() + marginal_bound;
    let telescoping_ok = steps.iter().all(StripStep::identity_holds);

    Ok(StrippingTrace {
        steps,
        termination,
        note,
        initial_moment,
        removed_moment,
        remaining,
        deficit,
        residual_moment,
        marginal_bound,
        total_error,
        telescoping_ok,
        final_potential: current,
        intermediate,
    })
}

impl AsRef<MatrixField> for StrippingTrace {
    fn as_ref(&self) -> &MatrixField {
        self.final_potential.field()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{square_well, Grid};

    #[test]
    fn single_well_strips_in_one_step() {
        let g = Grid::uniform(-15.0, 15.0, 3751).unwrap();
        let v = square_well(1.0, 1.0, 1, &g).unwrap();
        let t = strip_all(&v, &StripOptions::default()).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.termination, Termination::Empty);
        assert!(t.deficit < 0.0);
        assert!(t.telescoping_ok && t.ledger_holds());
        assert!((t.deficit + t.residual_moment).abs() < 1e-3 * t.residual_moment + t.total_error);
    }

    #[test]
    fn doubled_well_strips_with_k2() {
        let g = Grid::uniform(-15.0, 15.0, 3751).unwrap();
        let v = square_well(1.0, 1.0, 2, &g).unwrap();
        let t = strip_all(&v, &StripOptions::default()).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].multiplicity, 2);
        assert!(t.remaining.is_empty());
    }

    #[test]
    fn zero_potential_is_trivial() {
        let g = Grid::uniform(-5.0, 5.0, 501).unwrap();
        let v = MatrixPotential::zero(g, 1).unwrap();
        let t = strip_all(&v, &StripOptions::default()).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.deficit, 0.0);
        assert!(t.final_potential.field().is_zero());
        assert!(matches!(strip_once(&v, &StripOptions::default()).unwrap(), StripOutcome::NoBoundState));
    }

    #[test]
    fn step_budget_is_flagged() {
        let g = Grid::uniform(-15.0, 15.0, 3751).unwrap();
        let v = square_well(10.0, 1.0, 1, &g).unwrap();
        let opts = StripOptions { max_steps: Some(1), ..Default::default() };
        let t = strip_all(&v, &opts).unwrap();
        assert_eq!(t.termination, Termination::MaxSteps);
        assert!(!t.is_complete());
        assert_eq!(t.remaining.count(), 1);
    }
}
