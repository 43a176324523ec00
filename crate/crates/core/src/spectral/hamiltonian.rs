use crate::error::{Error, Result};
use crate::lattice::{Grid, MatrixField};
use crate::linalg::{self, CMatrix, CVector, C64};

/// Block-tridiagonal operator on the interior nodes: diagonal blocks
/// `2/h² I + V(x_i)`, off-diagonal coupling `-1/h² I`.
#[derive(Clone, Debug)]
pub struct DiscreteHamiltonian {
    grid: Grid,
    dim: usize,
    diagonal_blocks: Vec<CMatrix>,
    off_diagonal: f64,
}

/// Discretize `H` for the given field. Only interior nodes carry unknowns.
pub fn assemble<F: AsRef<MatrixField>>(field: &F) -> DiscreteHamiltonian {
    let field = field.as_ref();
    let grid = *field.grid();
    let h2 = grid.h() * grid.h();
    let n = grid.n_points();
    let dim = field.dim();
    let diag = linalg::scaled_identity(dim, 2.0 / h2);
    let diagonal_blocks = field.samples()[1..n - 1].iter().map(|v| v + &diag).collect();
    DiscreteHamiltonian { grid, dim, diagonal_blocks, off_diagonal: -1.0 / h2 }
}

const MAX_SHIFT_RETRIES: usize = 3;

impl DiscreteHamiltonian {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of unknowns, `(n_points - 2)·N`.
    pub fn size(&self) -> usize {
        self.diagonal_blocks.len() * self.dim
    }

    pub fn diagonal_blocks(&self) -> &[CMatrix] {
        &self.diagonal_blocks
    }

    pub fn off_diagonal(&self) -> f64 {
        self.off_diagonal
    }

    /// Number of eigenvalues strictly below `shift`, from the inertia of the
    /// block LDL* factorization of `H - shift`. A zero pivot triggers up to
    /// three retries with the shift nudged by `1e-12·|shift|`.
    pub fn count_below(&self, shift: f64) -> Result<usize> {
        let nudge = 1e-12 * if shift != 0.0 { shift.abs() } else { self.off_diagonal.abs() * f64::EPSILON };
        for attempt in 0..=MAX_SHIFT_RETRIES {
            let s = shift + attempt as f64 * nudge;
            let count = if self.dim == 1 { self.inertia_scalar(s) } else { self.inertia_blocks(s) };
            if let Some(c) = count {
                return Ok(c);
            }
        }
        Err(Error::numerical(format!("pivot breakdown in inertia count at shift {shift}")))
    }

    fn pivot_floor(&self) -> f64 {
        f64::MIN_POSITIVE * self.off_diagonal.abs().max(1.0) * 1e4
    }

    fn inertia_scalar(&self, shift: f64) -> Option<usize> {
        let c2 = self.off_diagonal * self.off_diagonal;
        let floor = self.pivot_floor();
        let mut count = 0;
        let mut inv = 0.0;
        for block in &self.diagonal_blocks {
            let d = block[(0, 0)].re - shift - c2 * inv;
            if !(d.abs() > floor) {
                return None;
            }
            if d < 0.0 {
                count += 1;
            }
            inv = 1.0 / d;
        }
        Some(count)
    }

    fn inertia_blocks(&self, shift: f64) -> Option<usize> {
        let n = self.dim;
        let c2 = self.off_diagonal * self.off_diagonal;
        let floor = self.pivot_floor();
        let zero = C64::new(0.0, 0.0);
        let mut s = vec![zero; n * n];
        let mut sinv = vec![zero; n * n];
        let mut l = vec![zero; n * n];
        let mut x = vec![zero; n * n];
        let mut d = vec![0.0; n];
        let mut count = 0;
        for (b, block) in self.diagonal_blocks.iter().enumerate() {
            for r in 0..n {
                for c in 0..n {
                    let mut v = block[(r, c)];
                    if b > 0 {
                        v -= sinv[r * n + c] * c2;
                    }
                    s[r * n + c] = v;
                }
                s[r * n + r].re -= shift;
            }
            // unpivoted LDL*: S = L D L*
            for j in 0..n {
                let mut dj = s[j * n + j].re;
                for k in 0..j {
                    dj -= l[j * n + k].norm_sqr() * d[k];
                }
                if !(dj.abs() > floor) {
                    return None;
                }
                d[j] = dj;
                if dj < 0.0 {
                    count += 1;
                }
                for r in (j + 1)..n {
                    let mut v = s[r * n + j];
                    for k in 0..j {
                        v -= l[r * n + k] * l[j * n + k].conj() * d[k];
                    }
                    l[r * n + j] = v / dj;
                }
            }
            // X = L⁻¹ (unit lower triangular)
            for c in 0..n {
                for r in 0..n {
                    x[r * n + c] = if r == c {
                        C64::new(1.0, 0.0)
                    } else if r < c {
                        zero
                    } else {
                        let mut v = zero;
                        for k in c..r {
                            v -= l[r * n + k] * x[k * n + c];
                        }
                        v
                    };
                }
            }
            // S⁻¹ = X* D⁻¹ X
            for r in 0..n {
                for c in 0..n {
                    let mut v = zero;
                    for k in r.max(c)..n {
                        v += x[k * n + r].conj() * x[k * n + c] / d[k];
                    }
                    sinv[r * n + c] = v;
                }
            }
        }
        Some(count)
    }

    /// Solve `(H - shift) u = rhs` by block elimination; `rhs` and the result
    /// live on the interior nodes.
    pub fn solve_shifted(&self, shift: f64, rhs: &[CVector]) -> Result<Vec<CVector>> {
        let m = self.diagonal_blocks.len();
        if rhs.len() != m {
            return Err(Error::param(format!("right-hand side has {} blocks, expected {m}", rhs.len())));
        }
        let c = C64::new(self.off_diagonal, 0.0);
        let shift_id = linalg::scaled_identity(self.dim, shift);
        let mut inverses: Vec<CMatrix> = Vec::with_capacity(m);
        let mut y: Vec<CVector> = Vec::with_capacity(m);
        for i in 0..m {
            let mut s = &self.diagonal_blocks[i] - &shift_id;
            let mut yi = rhs[i].clone();
            if i > 0 {
                s -= &inverses[i - 1] * (c * c);
                yi -= &inverses[i - 1] * &y[i - 1] * c;
            }
            let inv = s
                .try_inverse()
                .ok_or_else(|| Error::numerical(format!("singular pivot block {i} in shifted solve")))?;
            inverses.push(inv);
            y.push(yi);
        }
        let mut u = vec![CVector::zeros(self.dim); m];
        for i in (0..m).rev() {
            let mut r = y[i].clone();
            if i + 1 < m {
                r -= &u[i + 1] * c;
            }
            u[i] = &inverses[i] * r;
        }
        Ok(u)
    }

    /// A normalized eigenvector for the eigenvalue closest to `eigenvalue`,
    /// by a few steps of shifted inverse iteration. The returned samples cover
    /// all nodes, with zeros on the two Dirichlet ends.
    pub fn eigenvector_near(&self, eigenvalue: f64) -> Result<Vec<CVector>> {
        let m = self.diagonal_blocks.len();
        let shift = eigenvalue - 1e-9 * eigenvalue.abs().max(1.0);
        let mut v: Vec<CVector> = (0..m)
            .map(|i| CVector::from_fn(self.dim, |k, _| C64::new(1.0 + 0.1 * k as f64, 0.05 * ((i % 7) as f64))))
            .collect();
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v)?;
            let norm = v.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt() * self.grid.h().sqrt();
            for b in v.iter_mut() {
                *b /= C64::new(norm, 0.0);
            }
        }
        let mut full = Vec::with_capacity(m + 2);
        full.push(CVector::zeros(self.dim));
        full.extend(v);
        full.push(CVector::zeros(self.dim));
        Ok(full)
    }
}
