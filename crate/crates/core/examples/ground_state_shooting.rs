//! Ground-state energy and multiplicity by two-sided Riccati shooting,
//! cross-checked against the finite-difference spectrum, and the eigenvalue
//! braid of `F(x)` written as CSV.
//!
//! cargo run --release --example ground_state_shooting [out.csv]

use spectralstrip::darboux::{find_ground_state, shooting_function, ShootOptions};
use spectralstrip::lattice::{random_potential, square_well, RandomPotentialSpec};
use spectralstrip::spectral::{negative_spectrum, SpectrumOptions};
use spectralstrip::{Grid, MatrixPotential, Result};

fn report(name: &str, v: &MatrixPotential) -> Result<()> {
    let gs = find_ground_state(v, &ShootOptions::default())?.expect("potential binds");
    let fd = negative_spectrum(v, &SpectrumOptions::default())?;
    let fd_ground = fd.ground().unwrap();
    println!(
        "{name}: shooting lambda {:.10} (K = {}), finite differences {:.10} (x{}), {} bisections",
        gs.lambda(),
        gs.multiplicity(),
        fd_ground.lambda,
        fd_ground.multiplicity,
        gs.bisections()
    );
    Ok(())
}

fn main() -> Result<()> {
    let grid = Grid::uniform(-12.0, 12.0, 6001)?;
    let well = square_well(1.0, 1.0, 1, &grid)?;
    report("well", &well)?;
    report("well (x) I2", &square_well(1.0, 1.0, 2, &grid)?)?;
    report("random 3x3", &random_potential(&RandomPotentialSpec::new(4, 3, 1.0, 3.0), &grid)?)?;

    // The matching function changes sign at the ground state.
    let gs = find_ground_state(&well, &ShootOptions::default())?.unwrap();
    for dl in [-1e-3, -1e-5, 1e-5, 1e-3] {
        let g = shooting_function(&well, gs.lambda() + dl)?;
        println!("g(lambda1 {dl:+e}) = {g:?}");
    }

    let csv = gs.riccati().braid_table().to_csv()?;
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(path, csv)?,
        None => println!("braid: {} rows; F plateaus at +-{:.6}", csv.lines().count() - 2, gs.lambda().sqrt()),
    }
    Ok(())
}
