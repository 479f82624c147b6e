//! Fused kernels for the spatial parts of the generators.

use super::RotationMatrices;
use crate::grid::kernels::{fill_interior, stride};
use crate::grid::{Axis, Grid, VectorField3};

/// The two axes `(a, b)` with `Ω_l = x_a d_b - x_b d_a`.
#[inline]
pub(crate) fn rotation_axes(l: Axis) -> (usize, usize) {
    match l {
        Axis::X1 => (1, 2),
        Axis::X2 => (2, 0),
        Axis::X3 => (0, 1),
    }
}

/// `Ω_l f` on one scalar array.
pub(crate) fn rotation_scalar(grid: &Grid, src: &[f64], l: Axis, out: &mut [f64]) {
    let (a, b) = rotation_axes(l);
    let (sa, sb) = (stride(grid, a), stride(grid, b));
    let inv = 0.5 / grid.spacing();
    fill_interior(grid, out, |p, i, j, k| {
        let x = [grid.coord(i), grid.coord(j), grid.coord(k)];
        let db = (src[p + sb] - src[p - sb]) * inv;
        let da = (src[p + sa] - src[p - sa]) * inv;
        x[a] * db - x[b] * da
    });
}

/// `x · ∇f` on one scalar array.
pub(crate) fn radial_scalar(grid: &Grid, src: &[f64], out: &mut [f64]) {
    let s = [stride(grid, 0), stride(grid, 1), stride(grid, 2)];
    let inv = 0.5 / grid.spacing();
    fill_interior(grid, out, |p, i, j, k| {
        let x = [grid.coord(i), grid.coord(j), grid.coord(k)];
        (0..3)
            .map(|a| x[a] * (src[p + s[a]] - src[p - s[a]]))
            .sum::<f64>()
            * inv
    });
}

/// `Ω̃_l u = Ω_l u + U_l u`.
pub fn rotation(u: &VectorField3, l: Axis) -> VectorField3 {
    let grid = *u.grid();
    let mut out = VectorField3::zeros(grid);
    for c in 0..3 {
        rotation_scalar(&grid, u.component_slice(c), l, out.component_slice_mut(c));
    }
    let mix = u.apply_matrix(RotationMatrices::get(l));
    &out + &mix
}

/// `x · ∇u` applied componentwise.
pub fn radial_derivative(u: &VectorField3) -> VectorField3 {
    let grid = *u.grid();
    let mut out = VectorField3::zeros(grid);
    for c in 0..3 {
        radial_scalar(&grid, u.component_slice(c), out.component_slice_mut(c));
    }
    out
}

/// `(x · ∇ - 1) u`.
pub(crate) fn scaling_spatial(u: &VectorField3) -> VectorField3 {
    let mut out = radial_derivative(u);
    out.axpy(-1.0, u);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Norms;

    #[test]
    fn rotation_annihilates_identity_field() {
        let g = Grid::new(2.0, 9, 2).unwrap();
        let id = VectorField3::from_fn(g, |x| x);
        for l in Axis::ALL {
            let r = rotation(&id, l);
            // exact on interior nodes whose stencil stays inside
            let m = g.padded();
            for i in 3..m - 3 {
                for j in 3..m - 3 {
                    for k in 3..m - 3 {
                        assert_eq!(r.at(i, j, k), [0.0; 3]);
                    }
                }
            }
        }
    }

    #[test]
    fn radial_derivative_of_linear_field() {
        let g = Grid::new(2.0, 9, 2).unwrap();
        let f = VectorField3::from_fn(g, |x| [x[0], 2.0 * x[1] - x[2], 0.0]);
        let s = scaling_spatial(&f);
        let c = g.center_index();
        assert_eq!(s.at(c + 1, c - 1, c + 2), [0.0; 3]);
        let origin = radial_derivative(&f);
        assert_eq!(origin.at(c, c, c), [0.0; 3]);
    }

    #[test]
    fn rotation_of_scalar_bump_matches_jet() {
        use crate::jet::bump;
        let err = |n: usize| {
            let g = Grid::new(3.0, n, 2).unwrap();
            let c = [0.4, -0.2, 0.1];
            let f = VectorField3::from_fn(g, |x| {
                let y = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
                let v = bump(0, y, 2.5).value();
                [v, x[0] * v, 0.0]
            });
            let num = rotation(&f, Axis::X3);
            let exact = VectorField3::from_fn(g, |x| {
                let y = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
                let j = bump(2, y, 2.5);
                // Ω_3 acting on v(x - c): x1 d2 v - x2 d1 v
                let d1 = j.derivative(Axis::X1).value();
                let d2 = j.derivative(Axis::X2).value();
                let v = j.value();
                let o = x[0] * d2 - x[1] * d1;
                let f0 = v;
                let f1 = x[0] * v;
                // Ω_3 (x1 v) = x1 Ω_3 v - x2 v, plus U_3 f = (f1, -f0, 0)
                [o + f1, x[0] * o - x[1] * v - f0, 0.0]
            });
            (&num - &exact).l2_norm()
        };
        let (a, b) = (err(61), err(121));
        assert!((a / b).log2() > 1.8, "{a} {b}");
    }
}
