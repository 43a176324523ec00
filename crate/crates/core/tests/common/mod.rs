//! Independent reference values for the square well `-V0·χ[-a,a]` on the
//! whole line, from the even/odd matching conditions solved by bisection.
//! Nothing here touches the discretized operator.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    assert!(f_lo < 0.0, "bisection needs a sign change");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bound-state energies `λ = κ²` of the scalar well, ground state first.
///
/// With `z = k·a` and `z0 = a·√V0`, even states solve `z tan z = √(z0² - z²)`
/// on `(nπ, nπ + π/2)` and odd states solve `-z cot z = √(z0² - z²)` on
/// `(nπ + π/2, (n+1)π)`; each interval that starts below `z0` holds exactly
/// one root.
pub fn well_eigenvalues(depth: f64, a: f64) -> Vec<f64> {
    let z0 = a * depth.sqrt();
    let kappa_a = |z: f64| (z0 * z0 - z * z).max(0.0).sqrt();
    let mut out = Vec::new();
    let mut start = 0.0;
    let mut even = true;
    while start < z0 {
        let end = (start + FRAC_PI_2).min(z0);
        // Stay clear of the pole of tan/cot at the open interval end.
        let hi = if end < start + FRAC_PI_2 { end } else { end - 1e-15 * end.max(1.0) };
        let z = if even {
            bisect(|z| z * z.tan() - kappa_a(z), start + 1e-300, hi)
        } else {
            bisect(|z| -z / z.tan() - kappa_a(z), start, hi)
        };
        let kappa = kappa_a(z) / a;
        out.push(kappa * kappa);
        start += FRAC_PI_2;
        even = !even;
    }
    out
}

/// Exact `∫V² = 2a·V0²` of the continuum well.
pub fn well_moment(depth: f64, a: f64) -> f64 {
    2.0 * a * depth * depth
}

/// Ground-state energy of the depth-1, half-width-1 well from the reduced
/// equation `k tan k = √(1 - k²)`.
pub fn unit_well_ground() -> f64 {
    let k = bisect(|k| k * k.tan() - (1.0 - k * k).sqrt(), 1e-12, 1.0);
    1.0 - k * k
}

pub fn lt_sum(lambdas: &[f64], p: f64) -> f64 {
    lambdas.iter().map(|l| l.powf(p)).sum()
}
