use crate::error::{Error, Result};
use crate::lattice::{Grid, MatrixField};
use crate::linalg::{self, CMatrix, C64};
use crate::table::Table;

/// RK4 substeps per grid interval.
pub(crate) const SUBSTEPS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RiccatiStatus {
    Complete,
    /// `‖F‖₂` exceeded the a-priori bound while stepping onto this node.
    BlownUp { node: usize },
}

/// Sampled solution of `F' = V + λ I - F²` with `F(x_min) = √λ I`.
#[derive(Clone, Debug)]
pub struct RiccatiField {
    lambda: f64,
    grid: Grid,
    dim: usize,
    samples: Vec<CMatrix>,
    status: RiccatiStatus,
    max_hermiticity_defect: f64,
    pinned_nodes: usize,
}

impl RiccatiField {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// One sample per node up to the last node reached.
    pub fn samples(&self) -> &[CMatrix] {
        &self.samples
    }

    pub fn status(&self) -> RiccatiStatus {
        self.status
    }

    pub fn is_complete(&self) -> bool {
        self.status == RiccatiStatus::Complete
    }

    /// Largest `‖F - F*‖_F` seen before each re-hermitization.
    pub fn max_hermiticity_defect(&self) -> f64 {
        self.max_hermiticity_defect
    }

    /// Leading nodes, left of the support, held at exactly `√λ I`.
    pub fn pinned_nodes(&self) -> usize {
        self.pinned_nodes
    }

    pub(crate) fn complete_from(lambda: f64, grid: Grid, dim: usize, samples: Vec<CMatrix>, max_defect: f64, pinned_nodes: usize) -> Self {
        RiccatiField {
            lambda,
            grid,
            dim,
            samples,
            status: RiccatiStatus::Complete,
            max_hermiticity_defect: max_defect,
            pinned_nodes,
        }
    }

    /// Eigenvalues of `F(x)` per node: columns `x, f` (scalar) or
    /// `x, f1, .., fN` ascending.
    pub fn braid_table(&self) -> Table {
        let header: Vec<String> = if self.dim == 1 {
            vec!["x".into(), "f".into()]
        } else {
            std::iter::once("x".to_string()).chain((1..=self.dim).map(|k| format!("f{k}"))).collect()
        };
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut t = Table::new("braid", &header);
        for (i, f) in self.samples.iter().enumerate() {
            let mut row = vec![self.grid.x(i)];
            row.extend(linalg::hermitian_eigenvalues(f));
            t.push_f64(&row);
        }
        t
    }
}

/// Preallocated buffers for one RK4 substep of the Riccati flow.
struct Stepper {
    lambda: f64,
    k: [CMatrix; 4],
    tmp: CMatrix,
}

impl Stepper {
    fn new(dim: usize, lambda: f64) -> Self {
        let z = CMatrix::zeros(dim, dim);
        Stepper { lambda, k: [z.clone(), z.clone(), z.clone(), z.clone()], tmp: z }
    }

    fn rhs(lambda: f64, f: &CMatrix, v: &CMatrix, out: &mut CMatrix) {
        out.copy_from(v);
        for i in 0..out.nrows() {
            out[(i, i)].re += lambda;
        }
        out.gemm(C64::new(-1.0, 0.0), f, f, C64::new(1.0, 0.0));
    }

    fn step(&mut self, f: &mut CMatrix, dt: f64, v0: &CMatrix, vm: &CMatrix, v1: &CMatrix) {
        let lam = self.lambda;
        let half = C64::new(0.5 * dt, 0.0);
        let [k1, k2, k3, k4] = &mut self.k;
        Self::rhs(lam, f, v0, k1);
        self.tmp.copy_from(f);
        axpby(&mut self.tmp, half, k1, C64::new(1.0, 0.0));
        Self::rhs(lam, &self.tmp, vm, k2);
        self.tmp.copy_from(f);
        axpby(&mut self.tmp, half, k2, C64::new(1.0, 0.0));
        Self::rhs(lam, &self.tmp, vm, k3);
        self.tmp.copy_from(f);
        axpby(&mut self.tmp, C64::new(dt, 0.0), k3, C64::new(1.0, 0.0));
        Self::rhs(lam, &self.tmp, v1, k4);
        let w = C64::new(dt / 6.0, 0.0);
        let one = C64::new(1.0, 0.0);
        axpby(f, w, k1, one);
        axpby(f, w * 2.0, k2, one);
        axpby(f, w * 2.0, k3, one);
        axpby(f, w, k4, one);
    }
}

/// `x ← a·y + b·x`.
fn axpby(x: &mut CMatrix, a: C64, y: &CMatrix, b: C64) {
    x.zip_apply(y, |xi, yi| *xi = a * yi + b * *xi);
}

/// Linear interpolation of `V` at fractions `j/(2·SUBSTEPS)` of an interval.
pub(crate) fn interval_samples(v0: &CMatrix, v1: &CMatrix, out: &mut [CMatrix]) {
    let m = (out.len() - 1) as f64;
    for (j, o) in out.iter_mut().enumerate() {
        let s = j as f64 / m;
        o.copy_from(v0);
        axpby(o, C64::new(s, 0.0), v1, C64::new(1.0 - s, 0.0));
    }
}

/// Integrate the Riccati flow from the left edge up to `last_node`.
pub(crate) fn integrate(field: &MatrixField, lambda: f64, last_node: usize) -> Result<RiccatiField> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param(format!("trial energy magnitude must be positive, got {lambda}")));
    }
    let grid = *field.grid();
    let dim = field.dim();
    let last_node = last_node.min(grid.n_points() - 1);
    let root = lambda.sqrt();
    let initial = linalg::scaled_identity(dim, root);

    let start = match field.support_nodes() {
        Some((first, _)) => first.saturating_sub(1).min(last_node),
        None => last_node,
    };
    let mut samples = Vec::with_capacity(last_node + 1);
    samples.resize(start + 1, initial.clone());

    let bound = 10.0 * root + field.max_norm2().sqrt();
    let dt = grid.h() / SUBSTEPS as f64;
    let mut stepper = Stepper::new(dim, lambda);
    let mut vbuf = vec![CMatrix::zeros(dim, dim); 2 * SUBSTEPS + 1];
    let mut f = initial;
    let mut max_defect: f64 = 0.0;
    let mut status = RiccatiStatus::Complete;

    'nodes: for i in start..last_node {
        interval_samples(field.sample(i), field.sample(i + 1), &mut vbuf);
        for s in 0..SUBSTEPS {
            stepper.step(&mut f, dt, &vbuf[2 * s], &vbuf[2 * s + 1], &vbuf[2 * s + 2]);
            if !linalg::is_finite(&f) {
                return Err(Error::numerical(format!(
                    "non-finite Riccati state between x = {} and {} at λ = {lambda}",
                    grid.x(i),
                    grid.x(i + 1)
                )));
            }
            max_defect = max_defect.max(linalg::hermiticity_defect(&f));
            linalg::hermitize(&mut f);
            if f.norm() > bound && linalg::hermitian_norm2(&f) > bound {
                status = RiccatiStatus::BlownUp { node: i + 1 };
                break 'nodes;
            }
        }
        samples.push(f.clone());
    }

    Ok(RiccatiField {
        lambda,
        grid,
        dim,
        samples,
        status,
        max_hermiticity_defect: max_defect,
        pinned_nodes: start + 1,
    })
}

/// Right-anchored Riccati field: `F = -√λ I` at `x_max`, integrated towards
/// smaller `x`, where the decaying fixed point is attracting.
#[derive(Clone, Debug)]
pub(crate) struct BackwardSweep {
    /// First node reached.
    pub first: usize,
    /// Samples for nodes `first..n`, in node order.
    pub samples: Vec<CMatrix>,
    pub blown_up: bool,
    pub max_defect: f64,
}

impl BackwardSweep {
    pub fn at(&self, node: usize) -> &CMatrix {
        &self.samples[node - self.first]
    }
}

pub(crate) fn integrate_backward(field: &MatrixField, lambda: f64, first_node: usize) -> Result<BackwardSweep> {
    let grid = *field.grid();
    let n = grid.n_points();
    let dim = field.dim();
    let root = lambda.sqrt();
    let initial = linalg::scaled_identity(dim, -root);
    let start = match field.support_nodes() {
        Some((_, last)) => (last + 1).min(n - 1).max(first_node),
        None => first_node,
    };
    // reversed order while integrating
    let mut rev = vec![initial.clone(); n - start];
    let bound = 10.0 * root + field.max_norm2().sqrt();
    let dt = -grid.h() / SUBSTEPS as f64;
    let mut stepper = Stepper::new(dim, lambda);
    let mut vbuf = vec![CMatrix::zeros(dim, dim); 2 * SUBSTEPS + 1];
    let mut f = initial;
    let mut max_defect: f64 = 0.0;
    let mut blown_up = false;

    'nodes: for i in (first_node..start).rev() {
        interval_samples(field.sample(i + 1), field.sample(i), &mut vbuf);
        for s in 0..SUBSTEPS {
            stepper.step(&mut f, dt, &vbuf[2 * s], &vbuf[2 * s + 1], &vbuf[2 * s + 2]);
            if !linalg::is_finite(&f) {
                return Err(Error::numerical(format!("non-finite right Riccati state near x = {}", grid.x(i))));
            }
            max_defect = max_defect.max(linalg::hermiticity_defect(&f));
            linalg::hermitize(&mut f);
            if f.norm() > bound && linalg::hermitian_norm2(&f) > bound {
                blown_up = true;
                break 'nodes;
            }
        }
        rev.push(f.clone());
    }
    let first = n - rev.len();
    rev.reverse();
    Ok(BackwardSweep { first, samples: rev, blown_up, max_defect })
}

/// Integrate `F' = V + λ I - F²` across the whole grid with RK4 (four
/// substeps per interval, `V` linear in between) from `F(x_min) = √λ I`.
///
/// Nodes left of the support are exact fixed points and are copied rather
/// than integrated. If `‖F‖₂` exceeds `10√λ + max‖V‖₂^{1/2}` the integration
/// stops with [`RiccatiStatus::BlownUp`]; this happens when `-λ` lies above the
/// ground state and the underlying solution has a zero.
pub fn propagate_riccati<F: AsRef<MatrixField>>(field: &F, lambda: f64) -> Result<RiccatiField> {
    let field = field.as_ref();
    integrate(field, lambda, field.grid().n_points() - 1)
}

/// Closed-form Riccati flow in a region where `V = 0`, evaluated spectrally.
///
/// Each eigenvalue `ν` of `F(x₀)` moves as
/// `√λ (√λ t + ν)/(√λ + t ν)`, `t = tanh(√λ (x - x₀))`, which is written here
/// in terms of `e^{-2√λ(x-x₀)}` so that it stays finite for large distances.
#[derive(Clone, Debug)]
pub struct FreeEvolution {
    root: f64,
    values: Vec<f64>,
    vectors: CMatrix,
    pinned: Vec<bool>,
}

impl FreeEvolution {
    /// `pin_tol`: eigenvalues within this distance of `-√λ` are snapped onto it
    /// (bound-state directions, which the flow keeps fixed).
    ///
    /// Eigenvalues above `√λ` are admitted: they occur for potentials that are
    /// not negative semidefinite and relax to `√λ` from above without a pole.
    /// Eigenvalues below `-√λ` would produce a pole and are rejected.
    pub fn new(f0: &CMatrix, lambda: f64, pin_tol: f64) -> Result<Self> {
        Self::build(f0, lambda, pin_tol, f64::INFINITY)
    }

    fn build(f0: &CMatrix, lambda: f64, pin_tol: f64, upper_slack: f64) -> Result<Self> {
        let root = lambda.sqrt();
        let (values, vectors) = linalg::hermitian_eigen(f0);
        let mut pinned = Vec::with_capacity(values.len());
        let mut clamped = Vec::with_capacity(values.len());
        for &nu in &values {
            if nu < -root - 1e-8 || nu > root + upper_slack {
                return Err(Error::Consistency(format!(
                    "eigenvalue {nu} of F(x0) lies outside [-{root}, {root}]"
                )));
            }
            let pin = nu + root <= pin_tol;
            pinned.push(pin);
            clamped.push(if pin { -root } else if nu > root && upper_slack.is_finite() { root } else { nu });
        }
        Ok(FreeEvolution { root, values: clamped, vectors, pinned })
    }

    /// Eigenvalues of `F(x₀)` after clamping/snapping, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pinned_count(&self) -> usize {
        self.pinned.iter().filter(|p| **p).count()
    }

    pub fn eigenvalues_at(&self, dx: f64) -> Vec<f64> {
        let r = self.root;
        let e = (-2.0 * r * dx).exp();
        self.values
            .iter()
            .zip(&self.pinned)
            .map(|(&nu, &pin)| {
                let p = r + nu;
                if pin || p <= 0.0 {
                    return -r;
                }
                let q = r - nu;
                r * (p - e * q) / (p + e * q)
            })
            .collect()
    }

    pub fn at(&self, dx: f64) -> CMatrix {
        let ev = self.eigenvalues_at(dx);
        let d = nalgebra::DVector::from_iterator(ev.len(), ev.iter().map(|&v| C64::new(v, 0.0)));
        let mut f = &self.vectors * CMatrix::from_diagonal(&d) * self.vectors.adjoint();
        linalg::hermitize(&mut f);
        f
    }
}

/// `F(x₀ + dx)` from `F(x₀)` where the potential vanishes on `[x₀, x₀ + dx]`.
///
/// The spectrum of `F(x₀)` must lie in `[-√λ, √λ]` up to `1e-8`.
pub fn closed_form_f_free(f_at_x0: &CMatrix, lambda: f64, dx: f64) -> Result<CMatrix> {
    if !(lambda > 0.0) {
        return Err(Error::param(format!("trial energy magnitude must be positive, got {lambda}")));
    }
    Ok(FreeEvolution::build(f_at_x0, lambda, 0.0, 1e-8)?.at(dx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{square_well, MatrixPotential};

    #[test]
    fn free_field_is_fixed_point() {
        let g = Grid::uniform(-5.0, 5.0, 501).unwrap();
        let v = MatrixPotential::zero(g, 2).unwrap();
        let f = propagate_riccati(&v, 0.7).unwrap();
        assert!(f.is_complete());
        let expect = linalg::scaled_identity(2, 0.7f64.sqrt());
        assert_eq!(f.samples().len(), g.n_points());
        assert!(f.samples().iter().all(|s| *s == expect));
    }

    #[test]
    fn rejects_non_positive_lambda() {
        let g = Grid::uniform(-5.0, 5.0, 501).unwrap();
        let v = MatrixPotential::zero(g, 1).unwrap();
        assert!(propagate_riccati(&v, 0.0).is_err());
        assert!(propagate_riccati(&v, -1.0).is_err());
    }

    #[test]
    fn deep_trial_energy_stays_bounded() {
        let g = Grid::uniform(-15.0, 15.0, 6001).unwrap();
        let v = square_well(1.0, 1.0, 1, &g).unwrap();
        let f = propagate_riccati(&v, 0.9).unwrap();
        assert!(f.is_complete());
        let at_edge = f.samples()[g.nearest(1.0) + 1][(0, 0)].re;
        assert!(at_edge > -0.9f64.sqrt());
        // attracted to +√λ far to the right
        assert!((f.samples().last().unwrap()[(0, 0)].re - 0.9f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn shallow_trial_energy_blows_up() {
        let g = Grid::uniform(-15.0, 15.0, 6001).unwrap();
        let v = square_well(10.0, 1.0, 1, &g).unwrap();
        let f = propagate_riccati(&v, 1.0).unwrap();
        assert!(matches!(f.status(), RiccatiStatus::BlownUp { .. }));
    }

    #[test]
    fn closed_form_fixed_points() {
        let lam: f64 = 2.0;
        let r = lam.sqrt();
        for dx in [0.0, 0.3, 5.0, 100.0] {
            let up = closed_form_f_free(&CMatrix::from_element(1, 1, C64::new(r, 0.0)), lam, dx).unwrap();
            let down = closed_form_f_free(&CMatrix::from_element(1, 1, C64::new(-r, 0.0)), lam, dx).unwrap();
            assert!((up[(0, 0)].re - r).abs() < 1e-14);
            assert!((down[(0, 0)].re + r).abs() < 1e-14);
        }
        let mid = closed_form_f_free(&CMatrix::from_element(1, 1, C64::new(0.0, 0.0)), lam, 1.0).unwrap();
        let t = (r * 1.0).tanh();
        assert!((mid[(0, 0)].re - r * t).abs() < 1e-14);
        assert!(closed_form_f_free(&CMatrix::from_element(1, 1, C64::new(2.0 * r, 0.0)), lam, 1.0).is_err());
    }
}
