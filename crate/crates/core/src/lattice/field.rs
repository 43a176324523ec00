use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

use super::Grid;

/// Relative tolerance for the per-node hermiticity check.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Hermitian `N×N` matrix samples on every node of a grid.
///
/// This is the general container: outputs of the Darboux transform are
/// fields that decay but need not vanish outside a compact interval.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixField {
    grid: Grid,
    dim: usize,
    samples: Vec<CMatrix>,
}

impl MatrixField {
    pub fn new(grid: Grid, dim: usize, samples: Vec<CMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("matrix dimension must be at least 1"));
        }
        if samples.len() != grid.n_points() {
            return Err(Error::param(format!(
                "expected {} samples, got {}",
                grid.n_points(),
                samples.len()
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            if s.nrows() != dim || s.ncols() != dim {
                return Err(Error::param(format!("sample {i} is {}x{}, expected {dim}x{dim}", s.nrows(), s.ncols())));
            }
            if !linalg::is_finite(s) {
                return Err(Error::param(format!("sample {i} is not finite")));
            }
            let defect = linalg::hermiticity_defect(s);
            if defect > HERMITICITY_TOL * s.norm().max(1.0) {
                return Err(Error::param(format!("sample {i} is not hermitian (defect {defect:e})")));
            }
        }
        Ok(MatrixField { grid, dim, samples })
    }

    pub fn zeros(grid: Grid, dim: usize) -> Self {
        MatrixField { grid, dim, samples: vec![CMatrix::zeros(dim, dim); grid.n_points()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[CMatrix] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &CMatrix {
        &self.samples[i]
    }

    pub fn into_samples(self) -> Vec<CMatrix> {
        self.samples
    }

    /// `max_x ‖V(x)‖₂`.
    pub fn max_norm2(&self) -> f64 {
        self.samples
            .iter()
            .filter(|s| !is_zero(s))
            .map(linalg::hermitian_norm2)
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue over all nodes (0 for the zero field).
    pub fn min_eigenvalue(&self) -> f64 {
        self.samples
            .iter()
            .filter(|s| !is_zero(s))
            .map(|s| linalg::hermitian_eigenvalues(s)[0])
            .fold(0.0, f64::min)
    }

    /// Indices of the first and last nodes carrying a non-zero sample.
    pub fn support_nodes(&self) -> Option<(usize, usize)> {
        let first = self.samples.iter().position(|s| !is_zero(s))?;
        let last = self.samples.iter().rposition(|s| !is_zero(s))?;
        Some((first, last))
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(is_zero)
    }

    /// Frobenius norm at every node.
    pub fn node_norms(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm()).collect()
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        self.samples.iter().map(linalg::hermiticity_defect).fold(0.0, f64::max)
    }

    /// Largest positive eigenvalue over all nodes (0 if none).
    pub fn max_eigenvalue(&self) -> f64 {
        self.samples
            .iter()
            .filter(|s| !is_zero(s))
            .map(|s| *linalg::hermitian_eigenvalues(s).last().unwrap())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn is_zero(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

/// A matrix field that vanishes identically outside `[-a, a]`, with the
/// interval strictly inside the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPotential {
    field: MatrixField,
    support_half_width: f64,
}

impl MatrixPotential {
    pub fn new(field: MatrixField, support_half_width: f64) -> Result<Self> {
        let a = support_half_width;
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::param(format!("support half-width must be positive, got {a}")));
        }
        let grid = *field.grid();
        if !grid.contains_support(a) {
            return Err(Error::param(format!(
                "support [-{a}, {a}] is not strictly inside the grid [{}, {}]",
                grid.x_min(),
                grid.x_max()
            )));
        }
        for (i, s) in field.samples().iter().enumerate() {
            if grid.x(i).abs() > a && !is_zero(s) {
                return Err(Error::param(format!(
                    "sample at x = {} is non-zero outside the declared support {a}",
                    grid.x(i)
                )));
            }
        }
        Ok(MatrixPotential { field, support_half_width: a })
    }

    /// The zero potential, with a nominal support of one grid spacing.
    pub fn zero(grid: Grid, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("matrix dimension must be at least 1"));
        }
        MatrixPotential::new(MatrixField::zeros(grid, dim), grid.h())
    }

    pub fn field(&self) -> &MatrixField {
        &self.field
    }

    pub fn into_field(self) -> MatrixField {
        self.field
    }

    pub fn support_half_width(&self) -> f64 {
        self.support_half_width
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn samples(&self) -> &[CMatrix] {
        self.field.samples()
    }

    /// Every sample has eigenvalues ≤ `tol`.
    pub fn is_negative_semidefinite(&self, tol: f64) -> bool {
        self.field.max_eigenvalue() <= tol
    }
}

impl AsRef<MatrixField> for MatrixField {
    fn as_ref(&self) -> &MatrixField {
        self
    }
}

impl AsRef<MatrixField> for MatrixPotential {
    fn as_ref(&self) -> &MatrixField {
        &self.field
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn grid() -> Grid {
        Grid::uniform(-2.0, 2.0, 41).unwrap()
    }

    #[test]
    fn rejects_non_hermitian_sample() {
        let g = grid();
        let mut samples = vec![CMatrix::zeros(2, 2); g.n_points()];
        samples[20][(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(MatrixField::new(g, 2, samples), Err(Error::Parameter(_))));
    }

    #[test]
    fn rejects_weight_outside_support() {
        let g = grid();
        let mut samples = vec![CMatrix::zeros(1, 1); g.n_points()];
        samples[35][(0, 0)] = C64::new(-1.0, 0.0);
        let f = MatrixField::new(g, 1, samples).unwrap();
        assert!(MatrixPotential::new(f.clone(), 1.0).is_err());
        assert!(MatrixPotential::new(f, 1.6).is_ok());
    }

    #[test]
    fn support_must_fit_in_grid() {
        let g = grid();
        assert!(MatrixPotential::new(MatrixField::zeros(g, 1), 2.0).is_err());
        assert!(MatrixPotential::zero(g, 1).is_ok());
    }
}
