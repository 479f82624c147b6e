//! Uniform Cartesian grids over a cube, fields sampled on them, and the
//! centered finite-difference operators the rest of the crate is built from.
//!
//! Storage is padded by `ghost` layers on every side. Ghost values are kept at
//! zero (zero extension): every kernel writes interior nodes only, so a freshly
//! produced field already satisfies the boundary rule.

mod field;
pub(crate) mod kernels;
pub(crate) mod norms;
mod ops;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use field::{ScalarField, VectorField3};
pub use norms::{l2_norm, sup_norm, weighted_l2, Norms};
pub(crate) use ops::{apply_elastic, check_speeds};

pub use ops::{
    divergence, elastic_operator, gradient, laplacian, partial, second_partial, Differentiate,
};

/// One of the three spatial coordinate axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Axis::ALL.get(i).copied()
    }
}

/// Uniform grid over `[-L, L]^3` with an odd node count so the origin is a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_width: f64,
    points_per_axis: usize,
    ghost_layers: usize,
    spacing: f64,
}

impl Grid {
    /// Builds a grid with `n` nodes per axis on `[-L, L]` and `g` zero ghost layers.
    pub fn new(half_width: f64, points_per_axis: usize, ghost_layers: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if points_per_axis < 3 || points_per_axis % 2 == 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be odd and at least 3, got {points_per_axis}"
            )));
        }
        if ghost_layers < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 ghost layers, got {ghost_layers}"
            )));
        }
        Ok(Grid {
            half_width,
            points_per_axis,
            ghost_layers,
            spacing: 2.0 * half_width / (points_per_axis - 1) as f64,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn ghost_layers(&self) -> usize {
        self.ghost_layers
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Nodes per axis including ghosts.
    pub fn padded(&self) -> usize {
        self.points_per_axis + 2 * self.ghost_layers
    }

    /// Total number of stored values per scalar array.
    pub fn storage_len(&self) -> usize {
        let m = self.padded();
        m * m * m
    }

    /// Storage indices of interior nodes along one axis.
    pub fn interior(&self) -> std::ops::Range<usize> {
        self.ghost_layers..self.ghost_layers + self.points_per_axis
    }

    /// Storage index of the origin along one axis.
    pub fn center_index(&self) -> usize {
        self.ghost_layers + (self.points_per_axis - 1) / 2
    }

    /// Coordinate of storage index `idx` along any axis. Exactly zero at the origin.
    #[inline]
    pub fn coord(&self, idx: usize) -> f64 {
        (idx as f64 - self.center_index() as f64) * self.spacing
    }

    #[inline]
    pub fn flat_index(&self, i: usize, j: usize, k: usize) -> usize {
        let m = self.padded();
        (i * m + j) * m + k
    }

    #[inline]
    pub fn position(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    /// Interior node coordinates along one axis, ascending.
    pub fn axis_coords(&self) -> Vec<f64> {
        self.interior().map(|i| self.coord(i)).collect()
    }

    /// Trapezoid quadrature weight of storage index `idx` along one axis (in units of `h`).
    #[inline]
    pub(crate) fn trapezoid_weight(&self, idx: usize) -> f64 {
        let first = self.ghost_layers;
        let last = self.ghost_layers + self.points_per_axis - 1;
        if idx == first || idx == last {
            0.5
        } else {
            1.0
        }
    }

    /// Number of interior layers separating node `(i, j, k)` from the ghost region.
    #[inline]
    pub(crate) fn depth(&self, i: usize, j: usize, k: usize) -> usize {
        let g = self.ghost_layers;
        let last = g + self.points_per_axis - 1;
        [i, j, k]
            .iter()
            .map(|&a| (a - g).min(last - a))
            .min()
            .unwrap_or(0)
    }
}

/// Builds a [`Grid`]; see [`Grid::new`].
pub fn make_grid(half_width: f64, points_per_axis: usize, ghost_layers: usize) -> Result<Grid> {
    Grid::new(half_width, points_per_axis, ghost_layers)
}
