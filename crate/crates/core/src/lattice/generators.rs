use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

use super::{Grid, MatrixField, MatrixPotential};

/// Fraction of the cell `[x - h/2, x + h/2]` covered by `[-a, a]`.
fn cell_weight(x: f64, h: f64, a: f64) -> f64 {
    let covered = ((x + 0.5 * h).min(a) - (x - 0.5 * h).max(-a)).max(0.0) / h;
    if covered > 1.0 - 1e-12 {
        1.0
    } else if covered < 1e-12 {
        0.0
    } else {
        covered
    }
}

/// `-diag(depths) · χ_[-a,a](x)`, sampled as cell averages so that an edge
/// node sitting on `±a` carries half the depth.
pub fn diagonal_well(depths: &[f64], a: f64, grid: &Grid) -> Result<MatrixPotential> {
    let dim = depths.len();
    if dim == 0 {
        return Err(Error::param("matrix dimension must be at least 1"));
    }
    if let Some(d) = depths.iter().find(|d| !(**d > 0.0) || !d.is_finite()) {
        return Err(Error::param(format!("well depths must be positive, got {d}")));
    }
    if !(a > 0.0) {
        return Err(Error::param(format!("well half-width must be positive, got {a}")));
    }
    if !grid.contains_support(a) {
        return Err(Error::param(format!(
            "well [-{a}, {a}] does not fit strictly inside [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let h = grid.h();
    let mut declared = a;
    let samples = grid
        .nodes()
        .map(|x| {
            let w = cell_weight(x, h, a);
            if w > 0.0 {
                declared = declared.max(x.abs());
            }
            let diag = depths.iter().map(|d| C64::new(if w > 0.0 { -d * w } else { 0.0 }, 0.0));
            CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(dim, diag))
        })
        .collect();
    let field = MatrixField::new(*grid, dim, samples)?;
    MatrixPotential::new(field, declared)
}

/// `-depth · I_N · χ_[-a,a](x)`.
pub fn square_well(depth: f64, a: f64, dim: usize, grid: &Grid) -> Result<MatrixPotential> {
    if dim == 0 {
        return Err(Error::param("matrix dimension must be at least 1"));
    }
    diagonal_well(&vec![depth; dim], a, grid)
}

/// Parameters of the seeded smooth random family
/// `V(x) = -strength · η(x/a) · B(x) B(x)*`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomPotentialSpec {
    pub seed: u64,
    pub dim: usize,
    pub a: f64,
    pub strength: f64,
    /// Draw only the diagonal of `B`; entry `(0,0)` then coincides with the
    /// scalar draw for the same seed.
    #[serde(default)]
    pub diagonal: bool,
}

impl RandomPotentialSpec {
    pub fn new(seed: u64, dim: usize, a: f64, strength: f64) -> Self {
        RandomPotentialSpec { seed, dim, a, strength, diagonal: false }
    }
}

/// Standard bump `exp(-1/(1-t²))` on `|t| < 1`, zero elsewhere.
fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// Coefficients of `c0 + c1 cos(πx/a) + s1 sin(πx/a) + c2 cos(2πx/a) + s2 sin(2πx/a)`.
#[derive(Clone, Copy)]
struct TrigEntry([C64; 5]);

impl TrigEntry {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        let mut c = [C64::new(0.0, 0.0); 5];
        for z in c.iter_mut() {
            let re = rng.random_range(-1.0..1.0);
            let im = rng.random_range(-1.0..1.0);
            *z = C64::new(re, im);
        }
        TrigEntry(c)
    }

    fn eval(&self, phase: f64) -> C64 {
        let [c0, c1, s1, c2, s2] = self.0;
        c0 + c1 * phase.cos() + s1 * phase.sin() + c2 * (2.0 * phase).cos() + s2 * (2.0 * phase).sin()
    }
}

pub fn random_potential(spec: &RandomPotentialSpec, grid: &Grid) -> Result<MatrixPotential> {
    let RandomPotentialSpec { seed, dim, a, strength, diagonal } = *spec;
    if dim == 0 {
        return Err(Error::param("matrix dimension must be at least 1"));
    }
    if !(strength > 0.0) || !strength.is_finite() {
        return Err(Error::param(format!("strength must be positive, got {strength}")));
    }
    if !(a > 0.0) || !grid.contains_support(a) {
        return Err(Error::param(format!(
            "support [-{a}, {a}] does not fit strictly inside [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries: Vec<Option<TrigEntry>> = vec![None; dim * dim];
    if diagonal {
        for j in 0..dim {
            entries[j * dim + j] = Some(TrigEntry::draw(&mut rng));
        }
    } else {
        for e in entries.iter_mut() {
            *e = Some(TrigEntry::draw(&mut rng));
        }
    }

    let omega = std::f64::consts::PI / a;
    let samples = grid
        .nodes()
        .map(|x| {
            let env = bump(x / a);
            if env == 0.0 {
                return CMatrix::zeros(dim, dim);
            }
            let b = CMatrix::from_fn(dim, dim, |r, c| {
                entries[r * dim + c].map_or(C64::new(0.0, 0.0), |e| e.eval(omega * x))
            });
            let mut v = (&b * b.adjoint()) * C64::new(-strength * env, 0.0);
            linalg::hermitize(&mut v);
            v
        })
        .collect();
    let field = MatrixField::new(*grid, dim, samples)?;
    MatrixPotential::new(field, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> Grid {
        Grid::uniform(-3.0, 3.0, 601).unwrap()
    }

    #[test]
    fn scalar_well_values() {
        let g = grid();
        let v = square_well(1.0, 1.0, 1, &g).unwrap();
        assert_eq!(v.samples()[g.nearest(0.0)][(0, 0)].re, -1.0);
        assert_eq!(v.samples()[g.nearest(2.0)][(0, 0)].re, 0.0);
        // node on the edge carries the cell average
        assert!((v.samples()[g.nearest(1.0)][(0, 0)].re + 0.5).abs() < 1e-9);
        assert!(v.support_half_width() <= 1.0 + 1e-9);
    }

    #[test]
    fn doubled_well_is_identity_times_scalar() {
        let g = grid();
        let v = square_well(1.0, 1.0, 2, &g).unwrap();
        let s = &v.samples()[g.nearest(0.0)];
        assert_eq!(*s, CMatrix::identity(2, 2) * C64::new(-1.0, 0.0));
    }

    #[test]
    fn well_outside_domain_is_rejected() {
        let g = Grid::uniform(-1.0, 0.4, 100).unwrap();
        assert!(matches!(square_well(5.0, 0.5, 1, &g), Err(Error::Parameter(_))));
    }

    #[test]
    fn off_node_edge_stays_inside_declared_support() {
        let g = grid();
        let v = square_well(2.0, 1.0023, 1, &g).unwrap();
        let total: f64 = g.trapezoid(v.samples().iter().map(|s| s[(0, 0)].re));
        assert!((total + 2.0 * 2.0 * 1.0023).abs() < 1e-9);
    }

    #[test]
    fn random_rejects_bad_parameters() {
        let g = grid();
        assert!(random_potential(&RandomPotentialSpec::new(1, 0, 1.0, 1.0), &g).is_err());
        assert!(random_potential(&RandomPotentialSpec::new(1, 2, 1.0, 0.0), &g).is_err());
        assert!(random_potential(&RandomPotentialSpec::new(1, 2, 3.5, 1.0), &g).is_err());
    }

    #[test]
    fn random_is_reproducible() {
        let g = grid();
        let spec = RandomPotentialSpec::new(42, 3, 1.0, 2.0);
        let a = random_potential(&spec, &g).unwrap();
        let b = random_potential(&spec, &g).unwrap();
        assert_eq!(a, b);
        let c = random_potential(&RandomPotentialSpec::new(43, 3, 1.0, 2.0), &g).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn diagonal_draw_embeds_scalar_draw() {
        let g = grid();
        let scalar = random_potential(&RandomPotentialSpec::new(9, 1, 1.0, 1.5), &g).unwrap();
        let spec = RandomPotentialSpec { diagonal: true, ..RandomPotentialSpec::new(9, 3, 1.0, 1.5) };
        let diag = random_potential(&spec, &g).unwrap();
        for (s, d) in scalar.samples().iter().zip(diag.samples()) {
            assert_eq!(s[(0, 0)], d[(0, 0)]);
            assert_eq!(d[(0, 1)], C64::new(0.0, 0.0));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn generator_invariants(seed in 0u64..10_000, dim in 1usize..4, strength in 0.1f64..5.0) {
            let g = Grid::uniform(-2.0, 2.0, 161).unwrap();
            let v = random_potential(&RandomPotentialSpec::new(seed, dim, 1.0, strength), &g).unwrap();
            prop_assert!(v.field().max_hermiticity_defect() == 0.0);
            prop_assert!(v.is_negative_semidefinite(1e-12 * strength));
            for (i, s) in v.samples().iter().enumerate() {
                if g.x(i).abs() >= 1.0 {
                    prop_assert!(s.iter().all(|z| *z == C64::new(0.0, 0.0)));
                }
            }
            if dim == 1 {
                prop_assert!(v.samples().iter().all(|s| s[(0, 0)].re <= 0.0));
            }
        }
    }
}
