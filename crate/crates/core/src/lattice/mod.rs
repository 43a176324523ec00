//! Grids, sampled matrix fields, potential generators, support truncation and
//! the on-disk formats for potentials.

mod field;
mod generators;
mod grid;
pub mod io;
mod truncate;

pub use field::{MatrixField, MatrixPotential, HERMITICITY_TOL};
pub use generators::{diagonal_well, random_potential, square_well, RandomPotentialSpec};
pub use grid::Grid;
pub use truncate::{truncate_support, Truncation};
