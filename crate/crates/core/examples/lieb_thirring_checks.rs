//! The sharp 3/2-moment inequality and the half-moment bracket on seeded
//! random matrix potentials.
//!
//! cargo run --release --example lieb_thirring_checks

use spectralstrip::lattice::{random_potential, RandomPotentialSpec};
use spectralstrip::spectral::SpectrumOptions;
use spectralstrip::stripping::{half_moment_bounds, verify_theorem1};
use spectralstrip::{Grid, Result};

fn main() -> Result<()> {
    let grid = Grid::uniform(-12.0, 12.0, 6001)?;
    let opts = SpectrumOptions::default();
    println!("seed dim strength   sum l^1.5   (3/16)int V^2   sum l^0.5 in [lo, hi]");
    for seed in 0..12u64 {
        let dim = 1 + (seed % 3) as usize;
        let strength = [1.0, 2.0, 3.0, 5.0, 8.0][(seed % 5) as usize];
        let v = random_potential(&RandomPotentialSpec::new(seed, dim, 1.0, strength), &grid)?;
        let t = verify_theorem1(&v, &opts)?;
        let h = half_moment_bounds(&v, &opts)?;
        println!(
            "{seed:>4} {dim:>3} {strength:>8} {:>11.5} {:>15.5}   {:.4} in [{:.4}, {:.4}] {}",
            t.lhs,
            t.rhs,
            h.moment,
            h.lower,
            h.upper,
            if t.pass && h.pass { "ok" } else { "VIOLATED" }
        );
    }
    Ok(())
}
