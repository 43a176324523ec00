//! One commutation step `V -> V - 2F'` on the depth-10 well: the ground
//! state disappears, the rest of the spectrum is untouched, and the moment
//! drop matches `(16/3) K lambda^{3/2}`.
//!
//! cargo run --release --example darboux_transform

use spectralstrip::darboux::{darboux_transform, find_ground_state, trace_identity_residual, ShootOptions};
use spectralstrip::lattice::square_well;
use spectralstrip::spectral::{negative_spectrum, potential_moment, SpectrumOptions};
use spectralstrip::{Grid, Result};

fn main() -> Result<()> {
    let grid = Grid::uniform(-40.0, 40.0, 40001)?;
    let v = square_well(10.0, 1.0, 1, &grid)?;
    let gs = find_ground_state(&v, &ShootOptions::default())?.unwrap();
    let w = darboux_transform(&v, &gs)?;

    let opts = SpectrumOptions::default();
    let before = negative_spectrum(&v, &opts)?;
    let after = negative_spectrum(&w, &opts)?;
    println!("before: {:?}", before.raw_eigenvalues());
    println!("after:  {:?}", after.raw_eigenvalues());

    let m0 = potential_moment(&v, 2)?;
    let m1 = potential_moment(&w, 2)?;
    let predicted = 16.0 / 3.0 * gs.multiplicity() as f64 * gs.lambda().powf(1.5);
    println!("moment {m0:.6} -> {m1:.6}, drop {:.6}, predicted {predicted:.6}", m0 - m1);
    println!("trace identity residual {:.3e}", trace_identity_residual(&v, &w, &gs)?);
    Ok(())
}
