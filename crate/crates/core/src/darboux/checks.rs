use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::riccati::RiccatiField;
use super::shoot::GroundState;
use crate::error::{Error, Result};
use crate::lattice::{Grid, MatrixField};
use crate::linalg::{CMatrix, CVector, C64};

/// Max over interior nodes of `‖(F_{i+1} - F_{i-1})/2h - (V_i + λ - F_i²)‖_F`.
///
/// Only nodes reached by the integration are used. Second order for smooth `V`.
pub fn riccati_residual<F: AsRef<MatrixField>>(field: &F, riccati: &RiccatiField) -> f64 {
    let field = field.as_ref();
    let h = riccati.grid().h();
    let f = riccati.samples();
    let lam = C64::new(riccati.lambda(), 0.0);
    (1..f.len().saturating_sub(1))
        .map(|i| {
            let mut r = (&f[i + 1] - &f[i - 1]) / C64::new(2.0 * h, 0.0) - field.sample(i) + &f[i] * &f[i];
            for k in 0..r.nrows() {
                r[(k, k)] -= lam;
            }
            r.norm()
        })
        .fold(0.0, f64::max)
}

fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// Seeded smooth `C^N`-valued functions supported in `[-half_width, half_width]`:
/// a bump envelope times a random trigonometric polynomial of order 2 per
/// component.
pub fn smooth_trial_vectors(seed: u64, count: usize, grid: &Grid, dim: usize, half_width: f64) -> Result<Vec<Vec<CVector>>> {
    if !(half_width > 0.0) || !grid.contains_support(half_width) {
        return Err(Error::param(format!("trial support half-width {half_width} must lie inside the grid")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let coeffs: Vec<[C64; 5]> = (0..dim).map(|_| std::array::from_fn(|_| draw(&mut rng))).collect();
        let phi = grid
            .nodes()
            .map(|x| {
                let env = bump(x / half_width);
                let th = std::f64::consts::PI * x / half_width;
                CVector::from_iterator(
                    dim,
                    coeffs.iter().map(|c| {
                        if env == 0.0 {
                            return C64::new(0.0, 0.0);
                        }
                        (c[0] + c[1] * th.cos() + c[2] * th.sin() + c[3] * (2.0 * th).cos() + c[4] * (2.0 * th).sin()) * env
                    }),
                )
            })
            .collect();
        out.push(phi);
    }
    Ok(out)
}

fn check_trial(grid: &Grid, dim: usize, phi: &[CVector]) -> Result<()> {
    if phi.len() != grid.n_points() || phi.iter().any(|p| p.len() != dim) {
        return Err(Error::param("trial vector does not match grid and dimension"));
    }
    let scale = phi.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if phi[0].norm() > 1e-12 * scale || phi[phi.len() - 1].norm() > 1e-12 * scale {
        return Err(Error::param("trial vectors must vanish at both grid ends"));
    }
    Ok(())
}

/// `D φ = φ' - F φ` by central differences (zero at the end nodes).
fn apply_d(ric: &[CMatrix], h: f64, phi: &[CVector]) -> Vec<CVector> {
    let n = phi.len();
    (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                return CVector::zeros(phi[i].len());
            }
            (&phi[i + 1] - &phi[i - 1]) / C64::new(2.0 * h, 0.0) - &ric[i] * &phi[i]
        })
        .collect()
}

fn ground_ric(gs: &GroundState) -> Result<&[CMatrix]> {
    let ric = gs.riccati();
    if !ric.is_complete() || ric.samples().len() != ric.grid().n_points() {
        return Err(Error::InvalidState("ground-state Riccati field is not complete".into()));
    }
    Ok(ric.samples())
}

/// Max over trial vectors of `|⟨φ,(H+λ₁)φ⟩ - ‖φ' - Fφ‖²| / ‖φ‖²`.
pub fn factorization_residual<F: AsRef<MatrixField>>(field: &F, gs: &GroundState, trials: &[Vec<CVector>]) -> Result<f64> {
    let field = field.as_ref();
    let grid = field.grid();
    let h = grid.h();
    let ric = ground_ric(gs)?;
    let lam = gs.lambda();
    let mut worst: f64 = 0.0;
    for phi in trials {
        check_trial(grid, field.dim(), phi)?;
        let n = phi.len();
        let quad_h = grid.trapezoid((0..n).map(|i| {
            if i == 0 || i == n - 1 {
                return 0.0;
            }
            let lap = (&phi[i] * C64::new(2.0, 0.0) - &phi[i + 1] - &phi[i - 1]) / C64::new(h * h, 0.0);
            let hphi = lap + field.sample(i) * &phi[i] + &phi[i] * C64::new(lam, 0.0);
            phi[i].dotc(&hphi).re
        }));
        let d = apply_d(ric, h, phi);
        let quad_d = grid.trapezoid(d.iter().map(|v| v.norm_squared()));
        let norm = grid.trapezoid(phi.iter().map(|v| v.norm_squared()));
        if norm > 0.0 {
            worst = worst.max((quad_h - quad_d).abs() / norm);
        }
    }
    Ok(worst)
}

/// `‖Dφ‖ / ‖φ‖` in the trapezoidal L² norm; small for the ground state.
pub fn kernel_defect(gs: &GroundState, phi: &[CVector]) -> Result<f64> {
    let ric = ground_ric(gs)?;
    let grid = gs.riccati().grid();
    let d = apply_d(ric, grid.h(), phi);
    let num = grid.trapezoid(d.iter().map(|v| v.norm_squared()));
    let den = grid.trapezoid(phi.iter().map(|v| v.norm_squared()));
    Ok((num / den).sqrt())
}

/// Propagate `ψ' = -Fψ` backwards from unit data at `x_max` and return
/// `ln(‖ψ(x_min)‖ / min‖ψ‖)`.
///
/// `D*ψ = 0` has no normalizable solution when this grows at the free rate
/// `√λ₁` per unit length across the region left of the support.
pub fn adjoint_kernel_growth(gs: &GroundState) -> Result<f64> {
    let ric = ground_ric(gs)?;
    let h = gs.riccati().grid().h();
    let dim = gs.riccati().dim();
    let mut psi = CVector::from_element(dim, C64::new(1.0 / (dim as f64).sqrt(), 0.0));
    let mut log_norm = 0.0;
    let mut log_min: f64 = 0.0;
    // dψ/ds = Fψ with s = -x
    let rhs = |f: &CMatrix, v: &CVector| f * v;
    for i in (1..ric.len()).rev() {
        let (f1, f0) = (&ric[i], &ric[i - 1]);
        let fm = (f0 + f1) * C64::new(0.5, 0.0);
        let hc = C64::new(h, 0.0);
        let k1 = rhs(f1, &psi);
        let k2 = rhs(&fm, &(&psi + &k1 * (hc * 0.5)));
        let k3 = rhs(&fm, &(&psi + &k2 * (hc * 0.5)));
        let k4 = rhs(f0, &(&psi + &k3 * hc));
        psi += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * (hc / 6.0);
        let n = psi.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::numerical("adjoint propagation lost its norm"));
        }
        psi /= C64::new(n, 0.0);
        log_norm += n.ln();
        log_min = log_min.min(log_norm);
    }
    Ok(log_norm - log_min)
}
