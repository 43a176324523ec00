//! Potential files: save a generated potential, reload it, truncate its
//! support and export the `Tr V` profile.
//!
//! cargo run --release --example potential_io

use spectralstrip::lattice::{io, random_potential, truncate_support, RandomPotentialSpec};
use spectralstrip::{Grid, Result};

fn main() -> Result<()> {
    let grid = Grid::uniform(-4.0, 4.0, 801)?;
    let v = random_potential(&RandomPotentialSpec::new(11, 2, 1.5, 2.0), &grid)?;

    let path = std::env::temp_dir().join("spectralstrip_potential.json");
    io::save_potential(&v, &path)?;
    let back = io::load_potential(&path)?;
    println!("round trip exact: {}", back.samples() == v.samples());

    for thr in [1e-2, 1e-6, 1e-10] {
        let t = truncate_support(&v, thr)?;
        println!("threshold {thr:e}: cutoff radius {:.3}, discarded tail mass {:.3e}", t.cutoff_radius, t.tail_mass);
    }
    let csv = io::trace_table(&v).to_csv()?;
    println!("{}", csv.lines().take(4).collect::<Vec<_>>().join("\n"));
    std::fs::remove_file(path)?;
    Ok(())
}
