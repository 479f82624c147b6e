use super::kernels::{d1, d2, fill_interior, stride};
use super::{Axis, ScalarField, VectorField3};
use crate::error::{Error, Result};

/// Spatial differentiation shared by scalar and vector fields.
pub trait Differentiate: Sized {
    /// Centered second-order first derivative along `axis`.
    fn partial(&self, axis: Axis) -> Self;
    /// Compact three-point second derivative along `axis`.
    fn second_partial(&self, axis: Axis) -> Self;
    /// Sum of compact second derivatives along all axes.
    fn laplacian(&self) -> Self;
}

impl Differentiate for ScalarField {
    fn partial(&self, axis: Axis) -> Self {
        let mut out = ScalarField::zeros(*self.grid());
        d1(self.grid(), self.as_slice(), axis.index(), out.as_slice_mut());
        out
    }

    fn second_partial(&self, axis: Axis) -> Self {
        let mut out = ScalarField::zeros(*self.grid());
        d2(self.grid(), self.as_slice(), axis.index(), out.as_slice_mut());
        out
    }

    fn laplacian(&self) -> Self {
        let mut out = ScalarField::zeros(*self.grid());
        laplacian_into(self.grid(), self.as_slice(), out.as_slice_mut());
        out
    }
}

impl Differentiate for VectorField3 {
    fn partial(&self, axis: Axis) -> Self {
        let mut out = VectorField3::zeros(*self.grid());
        for c in 0..3 {
            d1(
                self.grid(),
                self.component_slice(c),
                axis.index(),
                out.component_slice_mut(c),
            );
        }
        out
    }

    fn second_partial(&self, axis: Axis) -> Self {
        let mut out = VectorField3::zeros(*self.grid());
        for c in 0..3 {
            d2(
                self.grid(),
                self.component_slice(c),
                axis.index(),
                out.component_slice_mut(c),
            );
        }
        out
    }

    fn laplacian(&self) -> Self {
        let mut out = VectorField3::zeros(*self.grid());
        for c in 0..3 {
            laplacian_into(self.grid(), self.component_slice(c), out.component_slice_mut(c));
        }
        out
    }
}

fn laplacian_into(grid: &super::Grid, src: &[f64], out: &mut [f64]) {
    let (s0, s1, s2) = (stride(grid, 0), stride(grid, 1), stride(grid, 2));
    let inv = 1.0 / (grid.spacing() * grid.spacing());
    fill_interior(grid, out, |p, _, _, _| {
        let c = -6.0 * src[p];
        (src[p + s0] + src[p - s0] + src[p + s1] + src[p - s1] + src[p + s2] + src[p - s2] + c)
            * inv
    });
}

/// Centered first derivative of a scalar or vector field.
pub fn partial<F: Differentiate>(f: &F, axis: Axis) -> F {
    f.partial(axis)
}

/// Compact second derivative of a scalar or vector field.
pub fn second_partial<F: Differentiate>(f: &F, axis: Axis) -> F {
    f.second_partial(axis)
}

/// Compact seven-point Laplacian.
pub fn laplacian<F: Differentiate>(f: &F) -> F {
    f.laplacian()
}

/// `sum_i d_i u^i` with centered differences.
pub fn divergence(u: &VectorField3) -> ScalarField {
    let grid = *u.grid();
    let (s0, s1, s2) = (stride(&grid, 0), stride(&grid, 1), stride(&grid, 2));
    let inv = 0.5 / grid.spacing();
    let (a, b, c) = (
        u.component_slice(0),
        u.component_slice(1),
        u.component_slice(2),
    );
    let mut out = ScalarField::zeros(grid);
    fill_interior(&grid, out.as_slice_mut(), |p, _, _, _| {
        (a[p + s0] - a[p - s0] + b[p + s1] - b[p - s1] + c[p + s2] - c[p - s2]) * inv
    });
    out
}

/// Centered gradient of a scalar field.
pub fn gradient(f: &ScalarField) -> VectorField3 {
    VectorField3::from_components([f.partial(Axis::X1), f.partial(Axis::X2), f.partial(Axis::X3)])
}

pub(crate) fn check_speeds(c1: f64, c2: f64) -> Result<()> {
    if !(c1.is_finite() && c2.is_finite() && c1 > 0.0 && c2 > 0.0) {
        return Err(Error::InvalidParams(format!(
            "wave speeds must be positive, got c1 = {c1}, c2 = {c2}"
        )));
    }
    if c1 * c1 <= 4.0 / 3.0 * c2 * c2 {
        return Err(Error::InvalidParams(format!(
            "need c1^2 > 4/3 c2^2, got c1 = {c1}, c2 = {c2}"
        )));
    }
    Ok(())
}

/// `A u = c2^2 Lap u + (c1^2 - c2^2) grad(div u)`.
///
/// The Laplacian uses the compact stencil, grad-div nests two centered differences.
pub fn elastic_operator(u: &VectorField3, c1: f64, c2: f64) -> Result<VectorField3> {
    check_speeds(c1, c2)?;
    Ok(apply_elastic(u, c1 * c1, c2 * c2))
}

pub(crate) fn apply_elastic(u: &VectorField3, c1sq: f64, c2sq: f64) -> VectorField3 {
    let grid = *u.grid();
    let div = divergence(u);
    let dv = div.as_slice();
    let inv = 0.5 / grid.spacing();
    let inv2 = 1.0 / (grid.spacing() * grid.spacing());
    let lam = c1sq - c2sq;
    let mut out = VectorField3::zeros(grid);
    for c in 0..3 {
        let src = u.component_slice(c);
        let sc = stride(&grid, c);
        let (s0, s1, s2) = (stride(&grid, 0), stride(&grid, 1), stride(&grid, 2));
        fill_interior(&grid, out.component_slice_mut(c), |p, _, _, _| {
            let lap = (src[p + s0] + src[p - s0] + src[p + s1] + src[p - s1] + src[p + s2]
                + src[p - s2]
                - 6.0 * src[p])
                * inv2;
            c2sq * lap + lam * (dv[p + sc] - dv[p - sc]) * inv
        });
    }
    out
}
