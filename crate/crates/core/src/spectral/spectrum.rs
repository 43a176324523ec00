use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::MatrixField;
use crate::linalg;
use crate::table::Table;

use super::hamiltonian::{assemble, DiscreteHamiltonian};

/// A cluster of numerically coincident eigenvalues `-λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multiplet {
    pub lambda: f64,
    pub multiplicity: usize,
    /// Below the Dirichlet-box resolution floor; excluded from strict
    /// multiplicity claims.
    #[serde(default)]
    pub marginal: bool,
}

/// Negative spectrum `{-λ_j}` of `H`, ground multiplet first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    multiplets: Vec<Multiplet>,
    #[serde(rename = "L")]
    count: usize,
    marginal_floor: f64,
    #[serde(skip)]
    raw: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    /// Gap below which consecutive eigenvalues merge. Defaults to
    /// `max(1e-8, 1e-6·λ)`.
    pub cluster_tol: Option<f64>,
}

impl Spectrum {
    /// Cluster raw magnitudes `λ > 0` (any order) into multiplets.
    pub fn from_lambdas(mut raw: Vec<f64>, cluster_tol: Option<f64>, marginal_floor: f64) -> Self {
        raw.sort_by(|a, b| b.total_cmp(a));
        let mut multiplets: Vec<Multiplet> = Vec::new();
        let mut group: Vec<f64> = Vec::new();
        let flush = |group: &mut Vec<f64>, out: &mut Vec<Multiplet>| {
            if group.is_empty() {
                return;
            }
            let lambda = group.iter().sum::<f64>() / group.len() as f64;
            out.push(Multiplet { lambda, multiplicity: group.len(), marginal: lambda < marginal_floor });
            group.clear();
        };
        for &lam in &raw {
            if let Some(&prev) = group.last() {
                let tol = cluster_tol.unwrap_or_else(|| (1e-6 * prev).max(1e-8));
                if prev - lam >= tol {
                    flush(&mut group, &mut multiplets);
                }
            }
            group.push(lam);
        }
        flush(&mut group, &mut multiplets);
        Spectrum { count: raw.len(), multiplets, marginal_floor, raw }
    }

    /// Build directly from `(λ, multiplicity)` pairs.
    pub fn from_multiplets(pairs: &[(f64, usize)]) -> Self {
        let mut multiplets: Vec<Multiplet> = pairs
            .iter()
            .map(|&(lambda, multiplicity)| Multiplet { lambda, multiplicity, marginal: false })
            .collect();
        multiplets.sort_by(|a, b| b.lambda.total_cmp(&a.lambda));
        let raw = multiplets.iter().flat_map(|m| std::iter::repeat_n(m.lambda, m.multiplicity)).collect();
        Spectrum { count: multiplets.iter().map(|m| m.multiplicity).sum(), multiplets, marginal_floor: 0.0, raw }
    }

    pub fn multiplets(&self) -> &[Multiplet] {
        &self.multiplets
    }

    /// Total count `L` with multiplicities.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn ground(&self) -> Option<&Multiplet> {
        self.multiplets.first()
    }

    /// Unclustered magnitudes, largest first.
    pub fn raw_eigenvalues(&self) -> &[f64] {
        &self.raw
    }

    pub fn marginal_floor(&self) -> f64 {
        self.marginal_floor
    }

    /// Multiplets that are resolved by the box.
    pub fn resolved(&self) -> impl Iterator<Item = &Multiplet> {
        self.multiplets.iter().filter(|m| !m.marginal)
    }

    /// Columns `index, lambda, multiplet, marginal`, one row per eigenvalue.
    pub fn table(&self) -> Table {
        let mut t = Table::new("spectrum", &["index", "lambda", "multiplet", "marginal"]);
        let mut index = 0;
        for (k, m) in self.multiplets.iter().enumerate() {
            for _ in 0..m.multiplicity {
                let lam = self.raw.get(index).copied().unwrap_or(m.lambda);
                t.push(vec![index.to_string(), crate::table::fmt_f64(lam), k.to_string(), m.marginal.to_string()]);
                index += 1;
            }
        }
        t
    }
}

/// `Σ_j multiplicity_j · λ_j^p`.
pub fn lt_moment(spectrum: &Spectrum, p: f64) -> f64 {
    assert!(p > 0.0, "moment exponent must be positive");
    spectrum.multiplets.iter().map(|m| m.multiplicity as f64 * m.lambda.powf(p)).sum()
}

/// Trapezoidal `∫ Tr(V(x)^power) dx` for `power ∈ {1, 2}`.
pub fn potential_moment<F: AsRef<MatrixField>>(field: &F, power: u32) -> Result<f64> {
    let field = field.as_ref();
    let grid = field.grid();
    match power {
        1 => Ok(grid.trapezoid(field.samples().iter().map(linalg::trace_re))),
        2 => Ok(grid.trapezoid(field.samples().iter().map(linalg::trace_square))),
        _ => Err(Error::param(format!("potential moment power must be 1 or 2, got {power}"))),
    }
}

fn bisection_tol(field: &MatrixField) -> f64 {
    1e-10 * field.max_norm2().max(1.0)
}

/// Lower end of a bracket with no eigenvalues below it.
fn spectral_floor(hd: &DiscreteHamiltonian, field: &MatrixField) -> Result<f64> {
    let mut lo = field.min_eigenvalue() - 1.0;
    for _ in 0..8 {
        if hd.count_below(lo)? == 0 {
            return Ok(lo);
        }
        lo = 2.0 * lo - 1.0;
    }
    Err(Error::numerical("could not find a lower bound for the spectrum"))
}

/// All eigenvalues of `H` below zero, located by inertia bisection with
/// shared intervals, then clustered into multiplets.
pub fn negative_spectrum<F: AsRef<MatrixField>>(field: &F, opts: &SpectrumOptions) -> Result<Spectrum> {
    let field = field.as_ref();
    let hd = assemble(field);
    let floor = field.grid().marginal_floor();
    let total = hd.count_below(0.0)?;
    if total == 0 {
        return Ok(Spectrum::from_lambdas(Vec::new(), opts.cluster_tol, floor));
    }
    let tol = bisection_tol(field);
    let lo = spectral_floor(&hd, field)?;

    let mut eigenvalues = vec![f64::NAN; total];
    let mut stack = vec![(lo, 0.0, 0usize, total)];
    while let Some((a, b, ca, cb)) = stack.pop() {
        if ca == cb {
            continue;
        }
        let mid = 0.5 * (a + b);
        if b - a <= tol {
            eigenvalues[ca..cb].fill(mid);
            continue;
        }
        let cm = hd.count_below(mid)?;
        stack.push((mid, b, cm, cb));
        stack.push((a, mid, ca, cm));
    }
    let lambdas = eigenvalues.into_iter().map(|e| -e).collect();
    Ok(Spectrum::from_lambdas(lambdas, opts.cluster_tol, floor))
}

/// Magnitude of the lowest eigenvalue if it is negative, by bisection on the
/// inertia count alone.
pub fn ground_estimate<F: AsRef<MatrixField>>(field: &F) -> Result<Option<f64>> {
    let field = field.as_ref();
    let hd = assemble(field);
    if hd.count_below(0.0)? == 0 {
        return Ok(None);
    }
    let tol = bisection_tol(field);
    let (mut a, mut b) = (spectral_floor(&hd, field)?, 0.0);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if hd.count_below(mid)? >= 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Some(-0.5 * (a + b)))
}
