//! Finite-difference discretization of `H = -d²/dx² ⊗ I + V` with Dirichlet
//! walls, Sylvester inertia counts and bisection for the negative spectrum.

mod hamiltonian;
mod spectrum;

pub use hamiltonian::{assemble, DiscreteHamiltonian};
pub use spectrum::{
    ground_estimate, lt_moment, negative_spectrum, potential_moment, Multiplet, Spectrum, SpectrumOptions,
};
