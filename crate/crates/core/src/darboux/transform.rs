use super::shoot::GroundState;
use crate::error::{Error, Result};
use crate::lattice::MatrixField;
use crate::linalg::{self, CMatrix, C64};
use crate::spectral::potential_moment;

/// `V - 2F' = 2F² - V - 2λ₁ I`, node by node.
///
/// Nodes where `F` is pinned at `√λ₁ I` (left of the support) are exactly
/// zero. The result decays like `e^{-2√λ₂ x}` on the right, so it is not
/// compactly supported until truncated.
pub fn darboux_transform<F: AsRef<MatrixField>>(field: &F, gs: &GroundState) -> Result<MatrixField> {
    let field = field.as_ref();
    let ric = gs.riccati();
    let grid = *field.grid();
    if !ric.is_complete() || ric.samples().len() != grid.n_points() {
        return Err(Error::InvalidState("ground-state Riccati field is not complete".into()));
    }
    if ric.grid() != &grid || ric.dim() != field.dim() {
        return Err(Error::InvalidState("ground state was computed for a different potential".into()));
    }
    let dim = field.dim();
    let two_lambda = C64::new(2.0 * gs.lambda(), 0.0);
    let samples = ric
        .samples()
        .iter()
        .zip(field.samples())
        .enumerate()
        .map(|(i, (f, v))| {
            if i < ric.pinned_nodes() {
                return CMatrix::zeros(dim, dim);
            }
            let mut w = f * f * C64::new(2.0, 0.0) - v;
            for k in 0..dim {
                w[(k, k)] -= two_lambda;
            }
            linalg::hermitize(&mut w);
            w
        })
        .collect();
    MatrixField::new(grid, dim, samples)
}

/// `∫Tr(V_new²) - ∫Tr(V²) + (16/3) K λ₁^{3/2}`; zero in exact arithmetic.
pub fn trace_identity_residual<F: AsRef<MatrixField>>(field: &F, transformed: &MatrixField, gs: &GroundState) -> Result<f64> {
    let before = potential_moment(field, 2)?;
    let after = potential_moment(transformed, 2)?;
    Ok(after - before + 16.0 / 3.0 * gs.multiplicity() as f64 * gs.lambda().powf(1.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::{find_ground_state, ShootOptions};
    use crate::lattice::{square_well, Grid};
    use crate::spectral::{negative_spectrum, SpectrumOptions};

    #[test]
    fn removes_the_only_bound_state() {
        let g = Grid::uniform(-12.0, 12.0, 6001).unwrap();
        let v = square_well(1.0, 1.0, 1, &g).unwrap();
        let gs = find_ground_state(&v, &ShootOptions::default()).unwrap().unwrap();
        let w = darboux_transform(&v, &gs).unwrap();
        assert!(w.samples()[..g.nearest(-1.0)].iter().all(|s| s[(0, 0)] == C64::new(0.0, 0.0)));
        let s = negative_spectrum(&w, &SpectrumOptions::default()).unwrap();
        assert!(s.is_empty(), "{:?}", s.multiplets());
        let r = trace_identity_residual(&v, &w, &gs).unwrap();
        assert!(r.abs() < 1e-4 * 2.0, "{r}");
    }
}
