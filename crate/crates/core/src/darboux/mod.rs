//! The commutation machinery.
//!
//! For a trial energy `-λ` the matrix Riccati field `F = M' M⁻¹` of the
//! solution `M` that behaves like `e^{√λ x}` on the left satisfies
//! `F' + F² = V + λ` with `F = √λ I` left of the support. At the ground-state
//! energy `-λ₁`, `H + λ₁ = D*D` with `D = d/dx - F`, and swapping the factors
//! gives an operator with potential `V - 2F' = 2F² - V - 2λ₁` whose spectrum
//! is that of `H` minus the ground multiplet of multiplicity `K`.
//!
//! The Riccati ODE is the primary path. [`propagate_m`] integrates `M` itself
//! with QR renormalization and serves as an independent cross-check.

mod checks;
mod msolution;
mod riccati;
mod shoot;
mod transform;

pub use checks::{adjoint_kernel_growth, factorization_residual, kernel_defect, riccati_residual, smooth_trial_vectors};
pub use msolution::{propagate_m, MatrixSolutionField, RenormFactor};
pub use riccati::{closed_form_f_free, propagate_riccati, FreeEvolution, RiccatiField, RiccatiStatus};
pub use shoot::{find_ground_state, shoot_ground_state, shooting_function, GroundState, ShootOptions};
pub use transform::{darboux_transform, trace_identity_residual};
