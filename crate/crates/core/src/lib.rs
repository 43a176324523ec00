//! Negative spectra of one-dimensional Schrödinger operators
//! `H = -d²/dx² ⊗ I + V(x)` with hermitian `N×N` matrix potentials, the
//! commutation (Darboux) method that removes the ground multiplet, and
//! numerical checks of the sharp Lieb–Thirring inequality
//! `Σ λ_j^{3/2} ≤ (3/16) ∫ Tr V² dx` together with the trace identities behind it.
//!
//! The crate is organized bottom-up:
//!
//! * [`lattice`]: grids, sampled matrix fields and potentials, generators,
//!   support truncation and file formats.
//! * [`spectral`]: the block-tridiagonal finite-difference operator, inertia
//!   counts and bisection for the negative spectrum.
//! * [`darboux`]: matrix Riccati propagation, ground-state shooting, the
//!   transform `V ↦ V - 2F'` and the identity checks around it.
//! * [`stripping`]: iterated removal with cutoffs, the error ledger and the
//!   inequality verdicts.
//! * [`report`]: experiment configuration, JSON reports and CSV plot data used
//!   by the `spectralstrip` binary.
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example` lists them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod darboux;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod report;
pub mod spectral;
pub mod stripping;
mod table;

pub use table::Table;

pub use error::{Error, Result};
pub use lattice::{Grid, MatrixField, MatrixPotential};
pub use spectral::{Multiplet, Spectrum};
