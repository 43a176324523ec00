use super::riccati::{interval_samples, SUBSTEPS};
use crate::error::{Error, Result};
use crate::lattice::{Grid, MatrixField};
use crate::linalg::{self, CMatrix, C64};

const RENORM_THRESHOLD: f64 = 1e8;
const MAX_CONDITION: f64 = 1e8;

/// One QR renormalization: from `node` on, the true solution equals the
/// displayed one times `factor · e^{log_scale}` (times all earlier factors).
#[derive(Clone, Debug)]
pub struct RenormFactor {
    pub node: usize,
    /// Upper-triangular `R` divided by its Frobenius norm.
    pub factor: CMatrix,
    pub log_scale: f64,
}

/// The matrix solution `M` of `-M'' + VM = -λM` with `M ~ e^{√λ x} A` on the
/// left, stored in renormalized form.
///
/// True values are `M_true(xᵢ) = Mᵢ · Cᵢ · e^{sᵢ}` with `Cᵢ` the ordered product
/// of factors logged at or before node `i` (latest on the left) and `sᵢ` the
/// accumulated log scale, starting from `√λ x_min`.
#[derive(Clone, Debug)]
pub struct MatrixSolutionField {
    lambda: f64,
    grid: Grid,
    dim: usize,
    m: Vec<CMatrix>,
    dm: Vec<CMatrix>,
    renorm_log: Vec<RenormFactor>,
    initial_log_scale: f64,
}

impl MatrixSolutionField {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Displayed (renormalized) `M` per node.
    pub fn samples(&self) -> &[CMatrix] {
        &self.m
    }

    pub fn derivative_samples(&self) -> &[CMatrix] {
        &self.dm
    }

    pub fn renorm_log(&self) -> &[RenormFactor] {
        &self.renorm_log
    }

    pub fn initial_log_scale(&self) -> f64 {
        self.initial_log_scale
    }

    /// `(M Cᵢ, M' Cᵢ, sᵢ)` per node: the true pair is the first two times `e^{sᵢ}`.
    pub fn unwound(&self) -> Vec<(CMatrix, CMatrix, f64)> {
        let mut acc = linalg::identity(self.dim);
        let mut scale = self.initial_log_scale;
        let mut log = self.renorm_log.iter().peekable();
        let mut out = Vec::with_capacity(self.m.len());
        for (i, (m, dm)) in self.m.iter().zip(&self.dm).enumerate() {
            while let Some(r) = log.next_if(|r| r.node <= i) {
                acc = &r.factor * acc;
                scale += r.log_scale;
            }
            out.push((m * &acc, dm * &acc, scale));
        }
        out
    }

    /// `F = M' M⁻¹`, which the renormalization leaves unchanged.
    pub fn riccati_samples(&self) -> Result<Vec<CMatrix>> {
        self.m
            .iter()
            .zip(&self.dm)
            .map(|(m, dm)| {
                let inv = m
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::numerical("displayed matrix solution is singular"))?;
                Ok(dm * inv)
            })
            .collect()
    }

    /// Largest `‖M*M' - M'*M‖_F / ‖M*M'‖_F` over the nodes, on unwound values.
    pub fn wronskian_drift(&self) -> f64 {
        self.unwound()
            .iter()
            .map(|(m, dm, _)| {
                let x = m.adjoint() * dm;
                let w = &x - x.adjoint();
                w.norm() / x.norm()
            })
            .fold(0.0, f64::max)
    }

    /// `ln|det M_true(xᵢ)|` per node.
    pub fn log_abs_det(&self) -> Vec<f64> {
        let n = self.dim as f64;
        let mut extra = 0.0;
        let mut scale = self.initial_log_scale;
        let mut log = self.renorm_log.iter().peekable();
        self.m
            .iter()
            .enumerate()
            .map(|(i, m)| {
                while let Some(r) = log.next_if(|r| r.node <= i) {
                    extra += r.factor.determinant().norm().ln();
                    scale += r.log_scale;
                }
                m.determinant().norm().ln() + extra + n * scale
            })
            .collect()
    }

    /// Deepest drop of `ln|det M|` below its running maximum over nodes `0..=last`.
    pub fn max_log_det_dip(&self, last: usize) -> f64 {
        let mut peak = f64::NEG_INFINITY;
        let mut dip: f64 = 0.0;
        for v in self.log_abs_det().into_iter().take(last + 1) {
            if !v.is_finite() {
                return f64::INFINITY;
            }
            peak = peak.max(v);
            dip = dip.max(peak - v);
        }
        dip
    }
}

/// Replace the stacked pair `[M; P]` (`N×k` blocks) by the `Q` factor of its
/// thin QR decomposition and return `R`.
pub(crate) fn orthonormalize_pair(m: &mut CMatrix, p: &mut CMatrix) -> CMatrix {
    let (n, k) = m.shape();
    let mut stack = CMatrix::zeros(2 * n, k);
    stack.rows_mut(0, n).copy_from(m);
    stack.rows_mut(n, n).copy_from(p);
    let qr = stack.qr();
    let (q, r) = (qr.q(), qr.r());
    *m = q.rows(0, n).into_owned();
    *p = q.rows(n, n).into_owned();
    r
}

/// One RK4 step of `M' = P`, `P' = (V + λ)M` with `V` at the step's start,
/// midpoint and end.
pub(crate) fn pair_step(m: &mut CMatrix, p: &mut CMatrix, dt: f64, lambda: f64, v0: &CMatrix, vm: &CMatrix, v1: &CMatrix) {
    let lam = C64::new(lambda, 0.0);
    let accel = |v: &CMatrix, m: &CMatrix| v * m + m * lam;
    let half = C64::new(0.5 * dt, 0.0);
    let full = C64::new(dt, 0.0);
    let k1p = accel(v0, m);
    let m2 = &*m + &*p * half;
    let p2 = &*p + &k1p * half;
    let k2p = accel(vm, &m2);
    let m3 = &*m + &p2 * half;
    let p3 = &*p + &k2p * half;
    let k3p = accel(vm, &m3);
    let m4 = &*m + &p3 * full;
    let p4 = &*p + &k3p * full;
    let k4p = accel(v1, &m4);
    let w = C64::new(dt / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    *m += (&*p + &p2 * two + &p3 * two + &p4) * w;
    *p += (&k1p + &k2p * two + &k3p * two + &k4p) * w;
}

/// Integrate `(M, M')` with `M'' = (V + λ)M` by RK4 from `M = e^{√λ x_min} A`,
/// `M' = √λ M`, renormalizing the stacked pair by QR whenever `‖M‖_F > 1e8`.
pub fn propagate_m<F: AsRef<MatrixField>>(field: &F, lambda: f64, a: &CMatrix) -> Result<MatrixSolutionField> {
    let field = field.as_ref();
    if !(lambda > 0.0) {
        return Err(Error::param(format!("trial energy magnitude must be positive, got {lambda}")));
    }
    let dim = field.dim();
    if a.nrows() != dim || a.ncols() != dim {
        return Err(Error::param(format!("initial matrix must be {dim}x{dim}")));
    }
    let cond = linalg::condition_number(a);
    if !(cond < MAX_CONDITION) {
        return Err(Error::param(format!("initial matrix is singular or ill-conditioned (cond = {cond:e})")));
    }

    let grid = *field.grid();
    let root = lambda.sqrt();
    let dt = grid.h() / SUBSTEPS as f64;
    let mut vbuf = vec![CMatrix::zeros(dim, dim); 2 * SUBSTEPS + 1];

    let mut m = a.clone();
    let mut p = a * C64::new(root, 0.0);
    let mut ms = Vec::with_capacity(grid.n_points());
    let mut ps = Vec::with_capacity(grid.n_points());
    let mut renorm_log = Vec::new();
    ms.push(m.clone());
    ps.push(p.clone());

    for i in 0..grid.n_points() - 1 {
        interval_samples(field.sample(i), field.sample(i + 1), &mut vbuf);
        for s in 0..SUBSTEPS {
            pair_step(&mut m, &mut p, dt, lambda, &vbuf[2 * s], &vbuf[2 * s + 1], &vbuf[2 * s + 2]);
        }
        if !linalg::is_finite(&m) || !linalg::is_finite(&p) {
            return Err(Error::numerical(format!("non-finite matrix solution near x = {}", grid.x(i + 1))));
        }
        if m.norm() > RENORM_THRESHOLD {
            let r = orthonormalize_pair(&mut m, &mut p);
            let scale = r.norm();
            renorm_log.push(RenormFactor { node: i + 1, factor: r / C64::new(scale, 0.0), log_scale: scale.ln() });
        }
        ms.push(m.clone());
        ps.push(p.clone());
    }

    Ok(MatrixSolutionField {
        lambda,
        grid,
        dim,
        m: ms,
        dm: ps,
        renorm_log,
        initial_log_scale: root * grid.x_min(),
    })
}
