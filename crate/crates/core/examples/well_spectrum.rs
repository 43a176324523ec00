//! Negative spectrum of scalar and matrix square wells by inertia-count
//! bisection, with Lieb-Thirring moments against potential moments.
//!
//! cargo run --release --example well_spectrum

use spectralstrip::lattice::{diagonal_well, square_well};
use spectralstrip::spectral::{lt_moment, negative_spectrum, potential_moment, SpectrumOptions};
use spectralstrip::{Grid, Result};

fn main() -> Result<()> {
    let grid = Grid::uniform(-12.0, 12.0, 6001)?;
    let opts = SpectrumOptions::default();

    for depth in [1.0, 10.0, 100.0] {
        let v = square_well(depth, 1.0, 1, &grid)?;
        let s = negative_spectrum(&v, &opts)?;
        let ratio = lt_moment(&s, 1.5) / (3.0 / 16.0 * potential_moment(&v, 2)?);
        println!("depth {depth:>5}: {} bound states, ratio to sharp bound {ratio:.5}", s.count());
        for m in s.multiplets() {
            println!("    lambda {:.8}  x{}{}", m.lambda, m.multiplicity, if m.marginal { "  (marginal)" } else { "" });
        }
    }

    // Doubling the well doubles every multiplicity.
    let doubled = negative_spectrum(&square_well(1.0, 1.0, 2, &grid)?, &opts)?;
    println!("well (x) I2: ground {:?}", doubled.ground());

    // Decoupled channels interleave.
    let diag = negative_spectrum(&diagonal_well(&[1.0, 0.5], 1.0, &grid)?, &opts)?;
    println!("diag(1, 0.5): {:?}", diag.multiplets().iter().map(|m| (m.lambda, m.multiplicity)).collect::<Vec<_>>());
    Ok(())
}
