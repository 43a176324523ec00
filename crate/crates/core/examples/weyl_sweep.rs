//! Depth sweep through the report layer: the ratio of the eigenvalue sum to
//! the sharp bound climbs toward 1 as wells deepen. Writes `report.json` and
//! `sweep.csv` when given an output directory.
//!
//! cargo run --release --example weyl_sweep [out_dir]

use spectralstrip::report::{parse_well, run, write_outputs, Command, ExperimentConfig};
use spectralstrip::Result;

fn main() -> Result<()> {
    let mut config = ExperimentConfig::new(Command::Sweep, parse_well("a=1 dim=1")?);
    config.depths = vec![0.25, 1.0, 4.0, 10.0, 30.0, 100.0];
    let report = run(&config)?;
    print!("{}", report.plots[0].to_csv()?);
    print!("{}", report.summary());
    if let Some(dir) = std::env::args().nth(1) {
        write_outputs(&report, dir.as_ref())?;
    }
    Ok(())
}
