use serde::{Deserialize, Serialize};

use super::msolution::{orthonormalize_pair, pair_step};
use super::riccati::{integrate, integrate_backward, interval_samples, BackwardSweep, FreeEvolution, RiccatiField, SUBSTEPS};
use crate::error::{Error, Result};
use crate::lattice::MatrixField;
use crate::linalg::{self, CMatrix, C64};
use crate::spectral::{assemble, ground_estimate};

const MAX_BISECTIONS: usize = 200;
/// Relative stopping width of the bisection.
const WIDTH_TOL: f64 = 1e-12;
/// Stop early once `|g| ≤ G_TOL·√λ`, which is roundoff level. A looser stop
/// leaves the two column blocks of the glued field visibly non-orthogonal.
const G_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ShootOptions {
    /// Absolute distance to `-√λ₁` within which an edge eigenvalue counts
    /// toward the degeneracy. Default `1e-5·√λ₁`.
    pub degeneracy_tol: Option<f64>,
}

/// Ground multiplet found by shooting, with the Riccati field at `λ₁`.
#[derive(Clone, Debug)]
pub struct GroundState {
    lambda: f64,
    multiplicity: usize,
    riccati: RiccatiField,
    edge_node: usize,
    matching_node: usize,
    edge_eigenvalues: Vec<f64>,
    degeneracy_tol: f64,
    bisections: usize,
}

#[derive(Serialize)]
struct GroundStateSummary<'a> {
    lambda1: f64,
    multiplicity: usize,
    edge_x: f64,
    matching_x: f64,
    edge_eigenvalues: &'a [f64],
    degeneracy_tol: f64,
    max_hermiticity_defect: f64,
    bisections: usize,
}

impl GroundState {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Degeneracy `K` of the ground multiplet.
    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    /// `F` at `λ₁` over the whole grid: the left-anchored integration up to
    /// the matching node, the two-block reconstruction beyond it.
    pub fn riccati(&self) -> &RiccatiField {
        &self.riccati
    }

    /// Node where the left and right fields were matched.
    pub fn matching_node(&self) -> usize {
        self.matching_node
    }

    /// First node right of the support.
    pub fn edge_node(&self) -> usize {
        self.edge_node
    }

    pub fn edge_x(&self) -> f64 {
        self.riccati.grid().x(self.edge_node)
    }

    /// Eigenvalues of `F` at the edge node, ascending; `K` of them equal `-√λ₁`.
    pub fn edge_eigenvalues(&self) -> &[f64] {
        &self.edge_eigenvalues
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol
    }

    pub fn bisections(&self) -> usize {
        self.bisections
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::to_value(GroundStateSummary {
            lambda1: self.lambda,
            multiplicity: self.multiplicity,
            edge_x: self.edge_x(),
            matching_x: self.riccati.grid().x(self.matching_node),
            edge_eigenvalues: &self.edge_eigenvalues,
            degeneracy_tol: self.degeneracy_tol,
            max_hermiticity_defect: self.riccati.max_hermiticity_defect(),
            bisections: self.bisections,
        })
        .expect("summary is plain data")
    }
}

fn edge_node(field: &MatrixField) -> usize {
    match field.support_nodes() {
        Some((_, last)) => (last + 1).min(field.grid().n_points() - 1),
        None => 0,
    }
}

/// Node inside the support where the discrete ground state near `-lambda_hint`
/// is largest; both one-sided integrations are stable up to it.
fn matching_node(field: &MatrixField, lambda_hint: f64) -> Result<usize> {
    let Some((first, last)) = field.support_nodes() else {
        return Ok(field.grid().n_points() / 2);
    };
    let psi = assemble(field).eigenvector_near(-lambda_hint)?;
    Ok((first..=last).max_by(|&a, &b| psi[a].norm().total_cmp(&psi[b].norm())).unwrap_or(first))
}

struct Probe {
    g: Option<f64>,
    left: RiccatiField,
    right: Option<BackwardSweep>,
}

fn probe(field: &MatrixField, lambda: f64, node: usize) -> Result<Probe> {
    let left = integrate(field, lambda, node)?;
    if !left.is_complete() {
        return Ok(Probe { g: None, left, right: None });
    }
    let right = integrate_backward(field, lambda, node)?;
    if right.blown_up {
        return Ok(Probe { g: None, left, right: None });
    }
    let mut delta = &left.samples()[node] - right.at(node);
    linalg::hermitize(&mut delta);
    let g = linalg::hermitian_eigenvalues(&delta)[0];
    Ok(Probe { g: Some(g), left, right: Some(right) })
}

/// Matching function `g(λ) = min eig (F_L - F_R)` at the interior matching
/// node, where `F_L` is the left-anchored field (`√λ I` at `x_min`) and
/// `F_R` the right-anchored one (`-√λ I` at `x_max`). `None` on blow-up.
///
/// Positive for `λ > λ₁`, zero at `λ₁` with a `K`-dimensional kernel, and
/// negative (or blown up) just below.
pub fn shooting_function<F: AsRef<MatrixField>>(field: &F, lambda: f64) -> Result<Option<f64>> {
    let field = field.as_ref();
    let node = matching_node(field, lambda)?;
    Ok(probe(field, lambda, node)?.g)
}

/// Bisect the matching function on `bracket = (λ_lo, λ_hi)`, where
/// `g(λ_hi) > 0` and `g(λ_lo)` is negative or blown up.
///
/// The returned `λ₁` comes from the upper side of the final bracket. `K` is
/// the number of eigenvalues of `F_L - F_R` within the degeneracy tolerance of
/// zero at the matching node; their eigenvectors span the ground multiplet
/// there.
pub fn shoot_ground_state<F: AsRef<MatrixField>>(
    field: &F,
    bracket: (f64, f64),
    opts: &ShootOptions,
) -> Result<GroundState> {
    let field = field.as_ref();
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::param(format!("invalid shooting bracket ({lo}, {hi})")));
    }
    let node = matching_node(field, hi)?;

    let top = probe(field, hi, node)?;
    let mut g_hi = match top.g {
        None => return Err(Error::Bracket(format!("Riccati flow blows up at the upper end λ = {hi}"))),
        Some(g) if g <= 0.0 => {
            return Err(Error::Bracket(format!("matching function is non-positive ({g}) at the upper end λ = {hi}")))
        }
        Some(g) => g,
    };
    let mut best = top;
    if let Some(g) = probe(field, lo, node)?.g {
        if g >= 0.0 {
            return Err(Error::Bracket(format!(
                "matching function has the same sign at both ends of ({lo}, {hi})"
            )));
        }
    }

    let mut bisections = 0;
    while g_hi > G_TOL * hi.sqrt() && hi - lo > WIDTH_TOL * hi.max(1.0) {
        if bisections == MAX_BISECTIONS {
            return Err(Error::numerical("shooting bisection did not converge"));
        }
        bisections += 1;
        let mid = 0.5 * (lo + hi);
        let p = probe(field, mid, node)?;
        match p.g {
            Some(g) if g >= 0.0 => {
                hi = mid;
                g_hi = g;
                best = p;
            }
            _ => lo = mid,
        }
    }

    let lambda = hi;
    let tol = opts.degeneracy_tol.unwrap_or(1e-5 * lambda.sqrt());
    if !(tol > 0.0) {
        return Err(Error::param(format!("degeneracy tolerance must be positive, got {tol}")));
    }
    let right = best.right.expect("complete probe has a right field");
    let edge = edge_node(field).max(node);
    let (samples, multiplicity) = glue(field, lambda, best.left.samples(), &right, node, edge, tol)?;
    let max_defect = best.left.max_hermiticity_defect().max(right.max_defect);
    let riccati = RiccatiField::complete_from(lambda, *field.grid(), field.dim(), samples, max_defect, best.left.pinned_nodes());
    let edge_eigenvalues = linalg::hermitian_eigenvalues(&riccati.samples()[edge]);

    Ok(GroundState {
        lambda,
        multiplicity,
        riccati,
        edge_node: edge,
        matching_node: node,
        edge_eigenvalues,
        degeneracy_tol: tol,
        bisections,
    })
}

/// `F_L` right of the matching node, rebuilt as `M' M⁻¹` from two column
/// blocks: the `K` bound directions carried by `ψ' = F_R ψ` (stable forwards,
/// they decay) and the complementary left solutions carried by the
/// second-order equation (stable forwards, they grow). Past `edge`, where
/// `V = 0`, the exact free flow takes over with the bound directions pinned.
fn glue(
    field: &MatrixField,
    lambda: f64,
    left: &[CMatrix],
    right: &BackwardSweep,
    node: usize,
    edge: usize,
    tol: f64,
) -> Result<(Vec<CMatrix>, usize)> {
    let grid = field.grid();
    let n = grid.n_points();
    let dim = field.dim();
    let mut delta = &left[node] - right.at(node);
    linalg::hermitize(&mut delta);
    let (values, vectors) = linalg::hermitian_eigen(&delta);
    let k = values.iter().take_while(|v| **v <= tol).count();
    if k == 0 {
        return Err(Error::numerical(format!(
            "matching converged at λ = {lambda} but min eig(F_L - F_R) = {} exceeds the degeneracy tolerance {tol}",
            values[0]
        )));
    }

    let mut samples = left[..=node].to_vec();
    let mut psi = vectors.columns(0, k).into_owned();
    let mut phi = vectors.columns(k, dim - k).into_owned();
    let mut dphi = &left[node] * &phi;
    let h = grid.h();
    let dt = h / SUBSTEPS as f64;
    let mut vbuf = vec![CMatrix::zeros(dim, dim); 2 * SUBSTEPS + 1];
    let half = C64::new(0.5 * h, 0.0);
    let mut m = CMatrix::zeros(dim, dim);
    let mut mp = CMatrix::zeros(dim, dim);

    for i in node..edge {
        let (r0, r1) = (right.at(i), right.at(i + 1));
        let rm = (r0 + r1) * C64::new(0.5, 0.0);
        let k1 = r0 * &psi;
        let k2 = &rm * (&psi + &k1 * half);
        let k3 = &rm * (&psi + &k2 * half);
        let k4 = r1 * (&psi + &k3 * C64::new(h, 0.0));
        psi += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);
        for mut col in psi.column_iter_mut() {
            let nrm = col.norm();
            col /= C64::new(nrm, 0.0);
        }
        if k < dim {
            interval_samples(field.sample(i), field.sample(i + 1), &mut vbuf);
            for s in 0..SUBSTEPS {
                pair_step(&mut phi, &mut dphi, dt, lambda, &vbuf[2 * s], &vbuf[2 * s + 1], &vbuf[2 * s + 2]);
            }
            orthonormalize_pair(&mut phi, &mut dphi);
        }
        m.columns_mut(0, k).copy_from(&psi);
        m.columns_mut(k, dim - k).copy_from(&phi);
        mp.columns_mut(0, k).copy_from(&(r1 * &psi));
        mp.columns_mut(k, dim - k).copy_from(&dphi);
        let inv = m
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::numerical(format!("ground-state solution matrix is singular at x = {}", grid.x(i + 1))))?;
        let mut f = &mp * inv;
        if !linalg::is_finite(&f) {
            return Err(Error::numerical(format!("non-finite ground-state field at x = {}", grid.x(i + 1))));
        }
        linalg::hermitize(&mut f);
        samples.push(f);
    }
    let free = FreeEvolution::new(&samples[edge], lambda, tol)?;
    if free.pinned_count() != k {
        return Err(Error::Consistency(format!(
            "{} edge eigenvalues lie within {tol} of -√λ but the matching kernel has dimension {k}",
            free.pinned_count()
        )));
    }
    let x0 = grid.x(edge);
    samples.extend((edge + 1..n).map(|i| free.at(grid.x(i) - x0)));
    Ok((samples, k))
}

/// Shoot with a bracket of ±10% around the finite-difference ground state.
///
/// Returns `None` when the potential has no negative eigenvalue.
pub fn find_ground_state<F: AsRef<MatrixField>>(field: &F, opts: &ShootOptions) -> Result<Option<GroundState>> {
    let field = field.as_ref();
    let Some(est) = ground_estimate(field)? else {
        return Ok(None);
    };
    match shoot_ground_state(field, (0.9 * est, 1.1 * est), opts) {
        Err(Error::Bracket(_)) => {
            let hi = field.max_norm2().max(1.1 * est) * 1.01;
            shoot_ground_state(field, (0.5 * est, hi), opts).map(Some)
        }
        other => other.map(Some),
    }
}
