//! Iterated stripping with the full error ledger: each step removes the
//! current ground multiplet, truncates the new potential's tail and records
//! the moment drop, and the final deficit is compared to the accumulated error.
//!
//! cargo run --release --example strip_ledger

use spectralstrip::lattice::{random_potential, square_well, RandomPotentialSpec};
use spectralstrip::stripping::{strip_all, StripOptions};
use spectralstrip::{Grid, MatrixPotential, Result};

fn show(name: &str, v: &MatrixPotential) -> Result<()> {
    let trace = strip_all(v, &StripOptions::default())?;
    println!("{name}: {:?} after {} steps", trace.termination, trace.steps.len());
    for s in &trace.steps {
        println!(
            "    lambda {:.8} x{}  moment {:.6} -> {:.6}  identity residual {:.1e}",
            s.lambda, s.multiplicity, s.moment_before, s.moment_after, s.identity_residual
        );
    }
    println!(
        "    deficit {:.6} <= total error {:.3e}: {}",
        trace.deficit,
        trace.total_error,
        trace.ledger_holds()
    );
    Ok(())
}

fn main() -> Result<()> {
    let grid = Grid::uniform(-40.0, 40.0, 20001)?;
    show("depth-10 well", &square_well(10.0, 1.0, 1, &grid)?)?;
    show("well (x) I2", &square_well(1.0, 1.0, 2, &grid)?)?;
    show("random 2x2", &random_potential(&RandomPotentialSpec::new(7, 2, 1.0, 3.0), &grid)?)?;
    Ok(())
}
