use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform lattice `x_i = x_min + i·h`, `h = (x_max - x_min)/(n_points - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridDescriptor", into = "GridDescriptor")]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    h: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct GridDescriptor {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl TryFrom<GridDescriptor> for Grid {
    type Error = Error;

    fn try_from(d: GridDescriptor) -> Result<Self> {
        Grid::uniform(d.x_min, d.x_max, d.n_points)
    }
}

impl From<Grid> for GridDescriptor {
    fn from(g: Grid) -> Self {
        GridDescriptor { x_min: g.x_min, x_max: g.x_max, n_points: g.n_points }
    }
}

impl Grid {
    pub fn uniform(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::param(format!("grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n_points < 3 {
            return Err(Error::param(format!("grid needs at least 3 points, got {n_points}")));
        }
        let h = (x_max - x_min) / (n_points - 1) as f64;
        Ok(Grid { x_min, x_max, n_points, h })
    }

    /// Grid on `[x_min, x_max]` whose spacing is as close as possible to `h`.
    pub fn with_spacing(x_min: f64, x_max: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::param("grid spacing must be positive"));
        }
        let n = ((x_max - x_min) / h).round() as usize + 1;
        Grid::uniform(x_min, x_max, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    /// Whether `[-a, a]` lies strictly inside the grid.
    pub fn contains_support(&self, a: f64) -> bool {
        self.x_min < -a && self.x_max > a
    }

    /// Index of the node nearest to `x`, clamped to the grid.
    pub fn nearest(&self, x: f64) -> usize {
        let t = ((x - self.x_min) / self.h).round();
        t.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// Trapezoidal weights.
    pub fn trapezoid<I: IntoIterator<Item = f64>>(&self, values: I) -> f64 {
        let last = self.n_points - 1;
        let mut acc = 0.0;
        for (i, v) in values.into_iter().enumerate() {
            let w = if i == 0 || i == last { 0.5 } else { 1.0 };
            acc += w * v;
        }
        acc * self.h
    }

    /// Dirichlet-box resolution floor `10·(π/width)²`; eigenvalues with smaller
    /// magnitude are too shallow for the box to resolve.
    pub fn marginal_floor(&self) -> f64 {
        10.0 * (std::f64::consts::PI / self.width()).powi(2)
    }
}
