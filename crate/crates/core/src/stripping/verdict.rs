use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::MatrixField;
use crate::spectral::{lt_moment, negative_spectrum, potential_moment, Spectrum, SpectrumOptions};

/// `Σλ^{3/2}` against `(3/16)∫Tr V²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Verdict {
    pub lhs: f64,
    pub rhs: f64,
    pub deficit: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `-¼∫Tr V ≤ Σλ^{1/2} ≤ -½∫Tr V`, each side relaxed by `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfMomentVerdict {
    pub moment: f64,
    pub lower: f64,
    pub upper: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn theorem1_verdict(spectrum: &Spectrum, trace_square_integral: f64) -> Theorem1Verdict {
    let lhs = lt_moment(spectrum, 1.5);
    let rhs = 3.0 / 16.0 * trace_square_integral;
    let deficit = lhs - rhs;
    let tolerance = 1e-6 * rhs.max(1.0);
    Theorem1Verdict { lhs, rhs, deficit, tolerance, pass: deficit <= tolerance }
}

pub fn half_moment_verdict(spectrum: &Spectrum, trace_integral: f64) -> HalfMomentVerdict {
    let moment = lt_moment(spectrum, 0.5);
    let lower = -0.25 * trace_integral;
    let upper = -0.5 * trace_integral;
    let tolerance = 1e-6 * upper.abs().max(1.0);
    HalfMomentVerdict {
        moment,
        lower,
        upper,
        tolerance,
        pass: lower - tolerance <= moment && moment <= upper + tolerance,
    }
}

pub fn verify_theorem1<F: AsRef<MatrixField>>(field: &F, opts: &SpectrumOptions) -> Result<Theorem1Verdict> {
    let spectrum = negative_spectrum(field, opts)?;
    Ok(theorem1_verdict(&spectrum, potential_moment(field, 2)?))
}

pub fn half_moment_bounds<F: AsRef<MatrixField>>(field: &F, opts: &SpectrumOptions) -> Result<HalfMomentVerdict> {
    let spectrum = negative_spectrum(field, opts)?;
    Ok(half_moment_verdict(&spectrum, potential_moment(field, 1)?))
}
