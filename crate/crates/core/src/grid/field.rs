use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{Array3, Zip};

use super::kernels::fill_interior;
use super::Grid;

fn zeros_like(grid: &Grid) -> Array3<f64> {
    let m = grid.padded();
    Array3::zeros((m, m, m))
}

fn sample<F>(grid: &Grid, f: F) -> Array3<f64>
where
    F: Fn([f64; 3]) -> f64 + Sync,
{
    let mut a = zeros_like(grid);
    let out = a.as_slice_mut().expect("standard layout");
    fill_interior(grid, out, |_, i, j, k| f(grid.position(i, j, k)));
    a
}

/// A real scalar sampled on the interior nodes of a [`Grid`] (ghosts zero).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    data: Array3<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField {
            data: zeros_like(&grid),
            grid,
        }
    }

    /// Samples `f` at every interior node.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn([f64; 3]) -> f64 + Sync,
    {
        ScalarField {
            data: sample(&grid, f),
            grid,
        }
    }

    pub(crate) fn from_array(grid: Grid, data: Array3<f64>) -> Self {
        debug_assert_eq!(data.len(), grid.storage_len());
        ScalarField { grid, data }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &Array3<f64> {
        &self.data
    }

    pub fn as_slice(&self) -> &[f64] {
        self.data.as_slice().expect("standard layout")
    }

    pub(crate) fn as_slice_mut(&mut self) -> &mut [f64] {
        self.data.as_slice_mut().expect("standard layout")
    }

    /// Value at storage index `(i, j, k)`.
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[[i, j, k]]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, a: f64) -> Self {
        ScalarField::from_array(self.grid, &self.data * a)
    }

    /// Pointwise product.
    pub fn mul_field(&self, other: &ScalarField) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        ScalarField::from_array(self.grid, &self.data * &other.data)
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &ScalarField) {
        assert_eq!(self.grid, x.grid, "grid mismatch");
        Zip::from(&mut self.data)
            .and(&x.data)
            .par_for_each(|s, &v| *s += a * v);
    }

    /// Pointwise map over interior nodes; `f` receives the value and the node position.
    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(f64, [f64; 3]) -> f64 + Sync,
    {
        let mut out = ScalarField::zeros(self.grid);
        let src = self.as_slice();
        let grid = self.grid;
        fill_interior(&grid, out.as_slice_mut(), |p, i, j, k| {
            f(src[p], grid.position(i, j, k))
        });
        out
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        ScalarField::from_array(self.grid, &self.data + &rhs.data)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        ScalarField::from_array(self.grid, &self.data - &rhs.data)
    }
}

/// An R^3-valued field sampled on the interior nodes of a [`Grid`] (ghosts zero).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    grid: Grid,
    comps: [Array3<f64>; 3],
}

impl VectorField3 {
    pub fn zeros(grid: Grid) -> Self {
        VectorField3 {
            comps: [zeros_like(&grid), zeros_like(&grid), zeros_like(&grid)],
            grid,
        }
    }

    /// Samples `f` at every interior node.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; 3] + Sync,
    {
        VectorField3 {
            comps: [
                sample(&grid, |x| f(x)[0]),
                sample(&grid, |x| f(x)[1]),
                sample(&grid, |x| f(x)[2]),
            ],
            grid,
        }
    }

    pub fn from_components(components: [ScalarField; 3]) -> Self {
        let grid = components[0].grid;
        assert!(
            components.iter().all(|c| c.grid == grid),
            "grid mismatch"
        );
        let [a, b, c] = components;
        VectorField3 {
            grid,
            comps: [a.data, b.data, c.data],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &Array3<f64> {
        &self.comps[c]
    }

    pub fn component_slice(&self, c: usize) -> &[f64] {
        self.comps[c].as_slice().expect("standard layout")
    }

    pub(crate) fn component_slice_mut(&mut self, c: usize) -> &mut [f64] {
        self.comps[c].as_slice_mut().expect("standard layout")
    }

    /// Component `c` as an owned scalar field.
    pub fn scalar(&self, c: usize) -> ScalarField {
        ScalarField::from_array(self.grid, self.comps[c].clone())
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        let grid = self.grid;
        let [a, b, c] = self.comps;
        [
            ScalarField::from_array(grid, a),
            ScalarField::from_array(grid, b),
            ScalarField::from_array(grid, c),
        ]
    }

    /// Vector value at storage index `(i, j, k)`.
    pub fn at(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.comps[0][[i, j, k]],
            self.comps[1][[i, j, k]],
            self.comps[2][[i, j, k]],
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|a| a.iter().all(|v| v.is_finite()))
    }

    pub fn scaled(&self, a: f64) -> Self {
        VectorField3 {
            grid: self.grid,
            comps: [&self.comps[0] * a, &self.comps[1] * a, &self.comps[2] * a],
        }
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &VectorField3) {
        assert_eq!(self.grid, x.grid, "grid mismatch");
        for c in 0..3 {
            Zip::from(&mut self.comps[c])
                .and(&x.comps[c])
                .par_for_each(|s, &v| *s += a * v);
        }
    }

    /// Multiplies every component pointwise by a scalar field.
    pub fn mul_scalar(&self, s: &ScalarField) -> Self {
        assert_eq!(self.grid, *s.grid(), "grid mismatch");
        VectorField3 {
            grid: self.grid,
            comps: [
                &self.comps[0] * s.data(),
                &self.comps[1] * s.data(),
                &self.comps[2] * s.data(),
            ],
        }
    }

    /// Pointwise Euclidean inner product.
    pub fn dot(&self, other: &VectorField3) -> ScalarField {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let mut out = ScalarField::zeros(self.grid);
        let (a, b) = (self, other);
        let a0 = a.component_slice(0);
        let a1 = a.component_slice(1);
        let a2 = a.component_slice(2);
        let b0 = b.component_slice(0);
        let b1 = b.component_slice(1);
        let b2 = b.component_slice(2);
        fill_interior(&self.grid, out.as_slice_mut(), |p, _, _, _| {
            a0[p] * b0[p] + a1[p] * b1[p] + a2[p] * b2[p]
        });
        out
    }

    /// Applies a constant 3x3 matrix to the vector at every node.
    pub fn apply_matrix(&self, m: &[[f64; 3]; 3]) -> Self {
        let mut out = VectorField3::zeros(self.grid);
        for (r, row) in m.iter().enumerate() {
            let dst = &mut out.comps[r];
            for (c, &coef) in row.iter().enumerate() {
                if coef != 0.0 {
                    Zip::from(&mut *dst)
                        .and(&self.comps[c])
                        .par_for_each(|d, &v| *d += coef * v);
                }
            }
        }
        out
    }

    /// Pointwise map over interior nodes; `f` receives the vector value and the node position.
    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn([f64; 3], [f64; 3]) -> [f64; 3] + Sync,
    {
        let grid = self.grid;
        let s0 = self.component_slice(0);
        let s1 = self.component_slice(1);
        let s2 = self.component_slice(2);
        let mut out = VectorField3::zeros(grid);
        for c in 0..3 {
            fill_interior(&grid, out.component_slice_mut(c), |p, i, j, k| {
                f([s0[p], s1[p], s2[p]], grid.position(i, j, k))[c]
            });
        }
        out
    }
}

impl Add for &VectorField3 {
    type Output = VectorField3;
    fn add(self, rhs: &VectorField3) -> VectorField3 {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        VectorField3 {
            grid: self.grid,
            comps: [
                &self.comps[0] + &rhs.comps[0],
                &self.comps[1] + &rhs.comps[1],
                &self.comps[2] + &rhs.comps[2],
            ],
        }
    }
}

impl Sub for &VectorField3 {
    type Output = VectorField3;
    fn sub(self, rhs: &VectorField3) -> VectorField3 {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        VectorField3 {
            grid: self.grid,
            comps: [
                &self.comps[0] - &rhs.comps[0],
                &self.comps[1] - &rhs.comps[1],
                &self.comps[2] - &rhs.comps[2],
            ],
        }
    }
}

impl Mul<f64> for &VectorField3 {
    type Output = VectorField3;
    fn mul(self, a: f64) -> VectorField3 {
        self.scaled(a)
    }
}

impl Neg for &VectorField3 {
    type Output = VectorField3;
    fn neg(self) -> VectorField3 {
        self.scaled(-1.0)
    }
}
