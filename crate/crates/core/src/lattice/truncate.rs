use crate::error::{Error, Result};
use crate::linalg;

use super::{MatrixField, MatrixPotential};

/// Result of cutting a decaying field down to compact support.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub potential: MatrixPotential,
    /// Half-width `c` of the retained interval `[-c, c]`.
    pub cutoff_radius: f64,
    /// `∫_{|x|>c} Tr(field²) dx`, the quadratic mass thrown away.
    pub tail_mass: f64,
}

/// Zero `field` outside the smallest symmetric interval `[-c, c]` beyond which
/// every node has `‖field(x)‖_F < threshold`.
///
/// The field must already be small near both grid ends (every node in the
/// outer tenth below `10·threshold`); otherwise the box is too small for the
/// requested cutoff and a [`Error::Decay`] is returned.
pub fn truncate_support<F: AsRef<MatrixField>>(field: &F, threshold: f64) -> Result<Truncation> {
    let field = field.as_ref();
    if !(threshold > 0.0) || !threshold.is_finite() {
        return Err(Error::param(format!("cutoff threshold must be positive, got {threshold}")));
    }
    let grid = *field.grid();
    let n = grid.n_points();
    let norms = field.node_norms();

    let edge = (n / 10).max(1);
    let outer = norms[..edge].iter().chain(&norms[n - edge..]).copied().fold(0.0, f64::max);
    if outer >= 10.0 * threshold {
        return Err(Error::Decay(format!(
            "node norm {outer:e} in the outer tenth of the grid exceeds 10 x threshold {threshold:e}"
        )));
    }

    let radius = norms
        .iter()
        .enumerate()
        .filter(|(_, &nv)| nv >= threshold)
        .map(|(i, _)| grid.x(i).abs())
        .fold(0.0, f64::max);
    let limit = (-grid.x_min()).min(grid.x_max());
    if radius >= limit {
        return Err(Error::Decay(format!("cutoff radius {radius} reaches the grid boundary {limit}")));
    }
    let cutoff_radius = if radius > 0.0 { radius } else { grid.h() };

    let mut tail_mass = 0.0;
    let samples = field
        .samples()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if grid.x(i).abs() > cutoff_radius {
                tail_mass += linalg::trace_square(s);
                crate::linalg::CMatrix::zeros(s.nrows(), s.ncols())
            } else {
                s.clone()
            }
        })
        .collect();
    tail_mass *= grid.h();

    let truncated = MatrixField::new(grid, field.dim(), samples)?;
    Ok(Truncation {
        potential: MatrixPotential::new(truncated, cutoff_radius)?,
        cutoff_radius,
        tail_mass,
    })
}
