//! The decaying matrix solution `M` behind `F = M'M^{-1}`: renormalized
//! propagation, Wronskian conservation, independence of the initial
//! normalization and the closed form of `F` past the support.
//!
//! cargo run --release --example matrix_solutions

use spectralstrip::darboux::{closed_form_f_free, propagate_m, propagate_riccati};
use spectralstrip::lattice::{random_potential, RandomPotentialSpec};
use spectralstrip::linalg::{identity, CMatrix, C64};
use spectralstrip::{Grid, Result};

fn main() -> Result<()> {
    let grid = Grid::uniform(-6.0, 6.0, 3001)?;
    let v = random_potential(&RandomPotentialSpec::new(5, 2, 1.0, 2.0), &grid)?;
    let lambda = 3.0;

    let a1 = identity(2);
    let a2 = CMatrix::from_row_slice(2, 2, &[C64::new(2.0, 0.0), C64::new(0.5, 1.0), C64::new(0.0, -1.0), C64::new(1.0, 0.0)]);
    let m1 = propagate_m(&v, lambda, &a1)?;
    let m2 = propagate_m(&v, lambda, &a2)?;
    println!("renormalizations: {}, Wronskian drift {:.2e}", m1.renorm_log().len(), m1.wronskian_drift());

    let f1 = m1.riccati_samples()?;
    let f2 = m2.riccati_samples()?;
    let spread = f1.iter().zip(&f2).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("max |F(A1) - F(A2)| = {spread:.2e}");

    let riccati = propagate_riccati(&v, lambda)?;
    let x0 = grid.nearest(1.0);
    let x1 = grid.nearest(2.0);
    let dx = grid.x(x1) - grid.x(x0);
    let closed = closed_form_f_free(&riccati.samples()[x0], lambda, dx)?;
    println!("closed form vs integrated at x = 2: {:.2e}", (closed - &riccati.samples()[x1]).norm());
    Ok(())
}
