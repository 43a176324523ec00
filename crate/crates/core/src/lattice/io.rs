//! Potential files (JSON) and per-node trace tables (CSV).
//!
//! File layout:
//!
//! ```text
//! {"grid": {"x_min": .., "x_max": .., "n_points": ..},
//!  "dim": N, "a": a,
//!  "samples": [[[re, im], ...N² pairs, row-major...], ...one list per node...]}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::table::Table;

use super::{Grid, MatrixField, MatrixPotential};

#[derive(Serialize, Deserialize)]
struct PotentialFile {
    grid: Grid,
    dim: usize,
    a: f64,
    samples: Vec<Vec<[f64; 2]>>,
}

pub fn potential_to_json(v: &MatrixPotential) -> Result<String> {
    let dim = v.dim();
    let samples = v
        .samples()
        .iter()
        .map(|m| {
            let mut row = Vec::with_capacity(dim * dim);
            for r in 0..dim {
                for c in 0..dim {
                    row.push([m[(r, c)].re, m[(r, c)].im]);
                }
            }
            row
        })
        .collect();
    let file = PotentialFile { grid: *v.grid(), dim, a: v.support_half_width(), samples };
    Ok(serde_json::to_string(&file)?)
}

pub fn potential_from_json(text: &str) -> Result<MatrixPotential> {
    let file: PotentialFile = serde_json::from_str(text)?;
    let dim = file.dim;
    if dim == 0 {
        return Err(Error::param("potential file declares dim = 0"));
    }
    let samples = file
        .samples
        .iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != dim * dim {
                return Err(Error::param(format!("node {i} has {} entries, expected {}", row.len(), dim * dim)));
            }
            Ok(CMatrix::from_row_iterator(dim, dim, row.iter().map(|&[re, im]| C64::new(re, im))))
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixPotential::new(MatrixField::new(file.grid, dim, samples)?, file.a)
}

pub fn save_potential(v: &MatrixPotential, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, potential_to_json(v)?)?;
    Ok(())
}

pub fn load_potential(path: impl AsRef<Path>) -> Result<MatrixPotential> {
    potential_from_json(&std::fs::read_to_string(path)?)
}

/// Columns `x, tr_v, tr_v2`, one row per node.
pub fn trace_table<F: AsRef<MatrixField>>(field: &F) -> Table {
    let field = field.as_ref();
    let grid = field.grid();
    let mut t = Table::new("potential", &["x", "tr_v", "tr_v2"]);
    for (i, s) in field.samples().iter().enumerate() {
        t.push_f64(&[grid.x(i), linalg::trace_re(s), linalg::trace_square(s)]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{random_potential, square_well, RandomPotentialSpec};
    use proptest::prelude::*;

    #[test]
    fn well_file_layout() {
        let g = Grid::uniform(-2.0, 2.0, 5).unwrap();
        let v = square_well(1.0, 1.0, 1, &g).unwrap();
        let text = potential_to_json(&v).unwrap();
        assert_eq!(
            text,
            r#"{"grid":{"x_min":-2.0,"x_max":2.0,"n_points":5},"dim":1,"a":1.0,"samples":[[[0.0,0.0]],[[-0.5,0.0]],[[-1.0,0.0]],[[-0.5,0.0]],[[0.0,0.0]]]}"#
        );
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(potential_from_json("{").is_err());
        let bad = r#"{"grid":{"x_min":-2.0,"x_max":2.0,"n_points":3},"dim":1,"a":1.0,"samples":[[[0,0]],[[-1,0],[0,0]],[[0,0]]]}"#;
        assert!(matches!(potential_from_json(bad), Err(Error::Parameter(_))));
    }

    #[test]
    fn trace_table_columns() {
        let g = Grid::uniform(-2.0, 2.0, 5).unwrap();
        let v = square_well(2.0, 1.0, 2, &g).unwrap();
        let csv = trace_table(&v).to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# spectralstrip potential v1"));
        assert_eq!(lines.next(), Some("x,tr_v,tr_v2"));
        assert_eq!(lines.nth(2), Some("0,-4,8"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn json_round_trip_is_exact(seed in 0u64..1000, dim in 1usize..4) {
            let g = Grid::uniform(-1.5, 1.5, 61).unwrap();
            let v = random_potential(&RandomPotentialSpec::new(seed, dim, 1.0, 2.5), &g).unwrap();
            let text = potential_to_json(&v).unwrap();
            let back = potential_from_json(&text).unwrap();
            prop_assert_eq!(&back, &v);
            prop_assert_eq!(potential_to_json(&back).unwrap(), text);
        }
    }
}
